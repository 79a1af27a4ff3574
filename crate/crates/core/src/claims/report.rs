use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::qstate::BIT_CONVENTION;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    NotApplicable,
    Inconclusive,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::NotApplicable => "not_applicable",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub key: String,
    pub verdict: Verdict,
    /// The number compared against a tolerance, when there is one.
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Value::is_null", default)]
    pub detail: Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<Value>,
}

impl InstanceResult {
    pub fn new(key: impl Into<String>, verdict: Verdict) -> Self {
        InstanceResult { key: key.into(), verdict, residual: None, detail: Value::Null, certificate: None }
    }

    pub fn residual(mut self, r: f64) -> Self {
        self.residual = Some(r);
        self
    }

    pub fn detail(mut self, d: Value) -> Self {
        self.detail = d;
        self
    }

    pub fn certificate<T: Serialize>(mut self, c: &T) -> Self {
        self.certificate = Some(serde_json::to_value(c).expect("certificates serialize"));
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub not_applicable: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claim: String,
    pub tool_version: String,
    pub bit_convention: String,
    pub population: String,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub summary: Summary,
    pub instances: Vec<InstanceResult>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub notes: BTreeMap<String, Value>,
    /// Not serialized, so reports from identical runs are byte-identical.
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl ClaimReport {
    pub fn new(claim: &str, population: impl Into<String>, seed: u64) -> Self {
        ClaimReport {
            claim: claim.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            bit_convention: BIT_CONVENTION.to_string(),
            population: population.into(),
            seed,
            tolerances: BTreeMap::new(),
            verdict: Verdict::NotApplicable,
            summary: Summary::default(),
            instances: Vec::new(),
            notes: BTreeMap::new(),
            wall_clock: Duration::ZERO,
        }
    }

    pub fn tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }

    pub fn note(&mut self, name: &str, value: Value) {
        self.notes.insert(name.to_string(), value);
    }

    pub fn push(&mut self, r: InstanceResult) {
        self.instances.push(r);
    }

    /// Recomputes the summary and the overall verdict: any fail wins, then
    /// any inconclusive, then pass; all-N/A stays N/A.
    pub fn finish(mut self, wall_clock: Duration) -> Self {
        let mut s = Summary::default();
        for i in &self.instances {
            match i.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Inconclusive => s.inconclusive += 1,
                Verdict::NotApplicable => s.not_applicable += 1,
            }
        }
        self.verdict = if s.fail > 0 {
            Verdict::Fail
        } else if s.inconclusive > 0 {
            Verdict::Inconclusive
        } else if s.pass > 0 {
            Verdict::Pass
        } else {
            Verdict::NotApplicable
        };
        self.summary = s;
        self.wall_clock = wall_clock;
        self
    }

    pub fn instance(&self, key: &str) -> Option<&InstanceResult> {
        self.instances.iter().find(|i| i.key == key)
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.instances.iter().filter(|i| i.verdict == v).count()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Per-instance seed derived from the run seed and the instance key, so a
/// cell's result does not depend on scheduling or on which other cells run.
pub fn instance_seed(seed: u64, key: &str) -> u64 {
    // FNV-1a over the key
    let h = key.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    splitmix64(seed ^ splitmix64(h))
}
