use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::graph_claims::{class_name, VerifyOptions};
use super::normal_form::{eq5_holds, mg4, normal_form_state, NormalFormParams, EQ5_TOL};
use super::records::{CertificateRecord, CONCURRENCE_TOL};
use super::report::{ClaimReport, InstanceResult, Verdict};
use crate::entanglement::{
    certify_biseparable, certify_zero_tangle, concurrence, schmidt_coefficients, three_tangle_pure, CERT_TOL,
    PRODUCT_TOL, RANK_TOL,
};
use crate::error::ClaimError;
use crate::graphs::{enumerate_connected_graphs, VertexSet};
use crate::linalg::hermitian_eigen;
use crate::qstate::{build_graph_state, partial_trace, DensityMatrix, StateVector};

/// Tolerance for single-qubit reductions against `I/2`.
pub const MIXED_TOL: f64 = 1e-10;
/// Two purities closer than this are the same value.
pub const PURITY_TOL: f64 = 1e-10;
/// A violated inequality must show at least this much pairwise concurrence.
pub const VIOLATION_CONCURRENCE: f64 = 1e-6;

/// Outcome of the "no genuine k-qubit entanglement" check at one level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelStatus {
    /// Every k-subset has a certificate.
    Certified,
    /// No violation found, but some subset could not be certified.
    Inconclusive,
    /// Some k-subset carries provable genuine k-qubit entanglement.
    Violated,
    /// Not examined because a lower level was violated.
    Skipped,
}

fn bipartitions(n: usize) -> impl Iterator<Item = (VertexSet, VertexSet)> {
    let full = VertexSet::full(n);
    (0..(1u32 << (n - 1)) - 1).map(move |bits| {
        let a: VertexSet = std::iter::once(0).chain((1..n).filter(|p| bits >> (p - 1) & 1 == 1)).collect();
        (a, full.difference(a))
    })
}

/// Smallest second Schmidt coefficient over all bipartitions; positive
/// iff the pure state is entangled across every cut.
fn min_second_schmidt(s: &StateVector) -> Result<f64, ClaimError> {
    let mut min = f64::INFINITY;
    for (a, _) in bipartitions(s.num_qubits()) {
        let sc = schmidt_coefficients(s, a)?;
        min = min.min(sc.get(1).copied().unwrap_or(0.0));
    }
    Ok(min)
}

/// Leading eigenvector of a (numerically) rank-1 reduction.
fn dominant_state(rho: &DensityMatrix) -> StateVector {
    let (vals, vecs) = hermitian_eigen(rho.matrix());
    let top = vals.iter().enumerate().fold(0, |b, (i, v)| if *v > vals[b] { i } else { b });
    StateVector::from_vector_unchecked(rho.num_qubits(), &vecs.column(top).into_owned())
}

fn level_instance(
    s: &StateVector,
    k: usize,
    sub: VertexSet,
    opts: &VerifyOptions,
) -> Result<InstanceResult, ClaimError> {
    let key = format!("level{k}/{sub}");
    let rho = partial_trace(s, sub)?;
    let rank = rho.rank(RANK_TOL);
    match k {
        2 => {
            let c = concurrence(&rho)?;
            Ok(if c < CONCURRENCE_TOL {
                let rec = CertificateRecord::Concurrence { graph: None, source: rho };
                InstanceResult::new(key, Verdict::Pass).residual(c).certificate(&rec)
            } else {
                InstanceResult::new(key, Verdict::Fail).residual(c).detail(json!({ "concurrence": c }))
            })
        }
        3 => {
            if rank == 1 {
                let pure = dominant_state(&rho);
                let tau = three_tangle_pure(&pure)?;
                if tau > CERT_TOL {
                    return Ok(InstanceResult::new(key, Verdict::Fail)
                        .residual(tau)
                        .detail(json!({ "pure_tangle": tau })));
                }
            }
            let out = certify_zero_tangle(&rho, &opts.certify(&key))?;
            Ok(match out.certificate {
                Some(cert) => {
                    let rec = CertificateRecord::ZeroTangle { graph: None, subset: sub, certificate: cert.clone() };
                    InstanceResult::new(key, Verdict::Pass).residual(cert.max_residual()).certificate(&rec)
                }
                None => InstanceResult::new(key, Verdict::Inconclusive)
                    .residual(out.best_value)
                    .detail(json!({ "rank": rank })),
            })
        }
        _ => {
            if rank == 1 {
                let pure = dominant_state(&rho);
                let second = min_second_schmidt(&pure)?;
                if second > PRODUCT_TOL {
                    return Ok(InstanceResult::new(key, Verdict::Fail)
                        .residual(second)
                        .detail(json!({ "pure_min_second_schmidt": second })));
                }
            }
            let out = certify_biseparable(&rho, &opts.certify(&key))?;
            Ok(match out.certificate {
                Some(cert) => {
                    let residual = cert.max_schmidt_second();
                    let bip = cert.bipartition;
                    let rec = CertificateRecord::Separability { graph: None, subset: sub, certificate: cert };
                    InstanceResult::new(key, Verdict::Pass)
                        .residual(residual)
                        .detail(json!({ "bipartition": bip }))
                        .certificate(&rec)
                }
                None => {
                    let best: Vec<_> =
                        out.best_by_bipartition.iter().map(|(p, v)| json!({ "bipartition": p, "defect": v })).collect();
                    InstanceResult::new(key, Verdict::Inconclusive).detail(json!({ "rank": rank, "best": best }))
                }
            })
        }
    }
}

/// Checks the three conditions for a fully multi-qubit entangled state:
/// non-product across every bipartition, maximally mixed single-qubit
/// reductions, and no genuine k-qubit entanglement for `2 <= k <= n-1`.
/// Levels above a violated one are reported as skipped.
pub fn check_fully_entangled(s: &StateVector, opts: &VerifyOptions) -> Result<ClaimReport, ClaimError> {
    let start = Instant::now();
    let n = s.num_qubits();
    if !(2..=6).contains(&n) {
        return Err(ClaimError::Precondition(format!("2 <= n <= 6 qubits, got {n}")));
    }
    let mut report = ClaimReport::new("fully-entangled", format!("{n}-qubit state"), opts.seed)
        .tolerance("product", PRODUCT_TOL)
        .tolerance("single_qubit_mixed", MIXED_TOL)
        .tolerance("concurrence", CONCURRENCE_TOL)
        .tolerance("member_tangle", CERT_TOL)
        .tolerance("schmidt_second", CERT_TOL);

    for (a, b) in bipartitions(n) {
        let sc = schmidt_coefficients(s, a)?;
        let second = sc.get(1).copied().unwrap_or(0.0);
        let product = (sc[0] - 1.0).abs() < PRODUCT_TOL;
        let verdict = if product { Verdict::Fail } else { Verdict::Pass };
        report.push(
            InstanceResult::new(format!("condition1/{a}|{b}"), verdict)
                .residual(second)
                .detail(json!({ "schmidt": sc })),
        );
    }

    for q in 0..n {
        let rho = partial_trace(s, VertexSet::singleton(q))?;
        let dev = rho.max_abs_diff(&DensityMatrix::maximally_mixed(vec![q]));
        let verdict = if dev < MIXED_TOL { Verdict::Pass } else { Verdict::Fail };
        report.push(InstanceResult::new(format!("condition2/{q}"), verdict).residual(dev));
    }

    let mut status = BTreeMap::new();
    let mut violated = false;
    for k in 2..n {
        if violated {
            status.insert(k.to_string(), LevelStatus::Skipped);
            report.push(
                InstanceResult::new(format!("level{k}"), Verdict::NotApplicable)
                    .detail(json!({ "reason": "a lower level is violated" })),
            );
            continue;
        }
        let subsets: Vec<VertexSet> = VertexSet::subsets_of_size(n, k).collect();
        let results = {
            use rayon::prelude::*;
            subsets.par_iter().map(|&sub| level_instance(s, k, sub, opts)).collect::<Result<Vec<_>, _>>()?
        };
        let level = if results.iter().any(|r| r.verdict == Verdict::Fail) {
            violated = true;
            LevelStatus::Violated
        } else if results.iter().any(|r| r.verdict == Verdict::Inconclusive) {
            LevelStatus::Inconclusive
        } else {
            LevelStatus::Certified
        };
        status.insert(k.to_string(), level);
        for r in results {
            report.push(r);
        }
    }
    report.note("level_status", json!(status));
    Ok(report.finish(start.elapsed()))
}

/// Parses `start:end:step` into an inclusive grid; the endpoint is kept
/// when it lies within 1e-12 of a step.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, ClaimError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || ClaimError::Precondition(format!("a grid of the form start:end:step, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !start.is_finite() || !end.is_finite() || end < start {
        return Err(bad());
    }
    let count = ((end - start) / step + 1e-12).floor() as usize;
    Ok((0..=count).map(|i| start + step * i as f64).collect())
}

fn purity_of_pair(s: &StateVector, pair: VertexSet) -> Result<f64, ClaimError> {
    Ok(partial_trace(s, pair)?.purity())
}

fn insert_distinct(values: &mut Vec<f64>, v: f64) {
    if !values.iter().any(|x| (x - v).abs() < PURITY_TOL) {
        values.push(v);
        values.sort_by(f64::total_cmp);
    }
}

/// The pair whose purity is compared (second and third qubit).
pub fn scan_pair() -> VertexSet {
    [1, 2].into_iter().collect()
}

/// Two-qubit purities over every pair of every connected 4-vertex graph
/// state, by class name.
pub fn graph_pair_purities() -> Result<BTreeMap<String, Vec<f64>>, ClaimError> {
    let mut out = BTreeMap::new();
    for g in enumerate_connected_graphs(4)? {
        let state = build_graph_state(&g)?;
        let mut values = Vec::new();
        for pair in VertexSet::subsets_of_size(4, 2) {
            insert_distinct(&mut values, purity_of_pair(&state, pair)?);
        }
        out.insert(class_name(&g).unwrap_or("?").to_string(), values);
    }
    Ok(out)
}

/// Compares the pair purity of `mg4(c)` against every value taken by
/// graph states. Purity is invariant under local unitaries, so a value
/// outside the graph set shows `mg4(c)` is not LU-equivalent to any
/// 4-qubit graph state under any qubit labeling.
pub fn lu_inequivalence_scan(grid: &[f64], seed: u64) -> Result<ClaimReport, ClaimError> {
    let start = Instant::now();
    if let Some(&c) = grid.iter().find(|&&c| !(0.0..=FRAC_1_SQRT_2 + 1e-12).contains(&c)) {
        return Err(ClaimError::OutOfRange { name: "c", value: c, min: 0.0, max: FRAC_1_SQRT_2 });
    }
    let by_class = graph_pair_purities()?;
    let mut all = Vec::new();
    for v in by_class.values().flatten() {
        insert_distinct(&mut all, *v);
    }
    let mut report = ClaimReport::new("mg4-scan", format!("{} grid values of c", grid.len()), seed)
        .tolerance("purity_match", PURITY_TOL);
    report.note("graph_purities_by_class", json!(by_class));
    report.note("graph_purity_set", json!(all));

    let mut flagged = Vec::new();
    for &c in grid {
        let c = c.min(FRAC_1_SQRT_2);
        let p = purity_of_pair(&mg4(c)?, scan_pair())?;
        let gap = all.iter().map(|x| (x - p).abs()).fold(f64::INFINITY, f64::min);
        let key = format!("c={c:.6}");
        let inst = if gap >= PURITY_TOL {
            flagged.push(c);
            InstanceResult::new(key, Verdict::Pass)
        } else {
            InstanceResult::new(key, Verdict::NotApplicable)
        };
        report.push(inst.residual(gap).detail(json!({ "c": c, "purity": p, "flagged": gap >= PURITY_TOL })));
    }
    let verdict = if flagged.is_empty() { Verdict::Inconclusive } else { Verdict::Pass };
    report.push(InstanceResult::new("inequivalence-witness", verdict).detail(json!({ "flagged": flagged })));
    Ok(report.finish(start.elapsed()))
}

fn random_params(rng: &mut ChaCha8Rng) -> NormalFormParams {
    let mut z = || {
        let re: f64 = StandardNormal.sample(&mut *rng);
        let im: f64 = StandardNormal.sample(&mut *rng);
        Complex64::new(re, im)
    };
    NormalFormParams::new(z(), z(), z(), z())
}

/// Largest concurrence over the six qubit pairs.
pub fn max_pair_concurrence(s: &StateVector) -> Result<f64, ClaimError> {
    let mut max: f64 = 0.0;
    for pair in VertexSet::subsets_of_size(s.num_qubits(), 2) {
        max = max.max(concurrence(&partial_trace(s, pair)?)?);
    }
    Ok(max)
}

/// Samples normal-form parameters and checks both directions of the link
/// between the six inequalities and vanishing pairwise concurrence, and
/// that the inequality verdict ignores the overall scale.
pub fn eq5_sweep(samples: usize, seed: u64) -> Result<ClaimReport, ClaimError> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ClaimReport::new("eq5-sweep", format!("{samples} random normal-form parameter sets"), seed)
        .tolerance("slack", EQ5_TOL)
        .tolerance("concurrence", CONCURRENCE_TOL)
        .tolerance("violation_concurrence", VIOLATION_CONCURRENCE);
    let (mut holds_count, mut violated_count) = (0usize, 0usize);
    let (mut holds_worst, mut violated_weakest) = (0.0f64, f64::INFINITY);
    let mut scale_mismatch = 0usize;
    for i in 0..samples {
        let raw = random_params(&mut rng);
        let (p, scale) = raw.normalized()?;
        let (holds, slack) = eq5_holds(&p);
        if eq5_holds(&raw).0 != holds {
            scale_mismatch += 1;
            report.push(
                InstanceResult::new(format!("scale/{i}"), Verdict::Fail)
                    .detail(json!({ "params": raw, "scale": scale })),
            );
        }
        let c = max_pair_concurrence(&normal_form_state(&p)?)?;
        if holds {
            holds_count += 1;
            holds_worst = holds_worst.max(c);
            if !(c < CONCURRENCE_TOL) {
                report.push(
                    InstanceResult::new(format!("sample/{i}"), Verdict::Fail)
                        .residual(c)
                        .detail(json!({ "params": p, "slack": slack, "holds": true })),
                );
            }
        } else {
            violated_count += 1;
            violated_weakest = violated_weakest.min(c);
            if !(c > VIOLATION_CONCURRENCE) {
                report.push(
                    InstanceResult::new(format!("sample/{i}"), Verdict::Fail)
                        .residual(c)
                        .detail(json!({ "params": p, "slack": slack, "holds": false })),
                );
            }
        }
    }
    let ok = |good: bool| if good { Verdict::Pass } else { Verdict::Fail };
    let holds_verdict = if holds_count == 0 { Verdict::Inconclusive } else { ok(holds_worst < CONCURRENCE_TOL) };
    report.push(
        InstanceResult::new("holds-implies-zero", holds_verdict)
            .residual(holds_worst)
            .detail(json!({ "samples": holds_count })),
    );
    let violated_verdict =
        if violated_count == 0 { Verdict::Inconclusive } else { ok(violated_weakest > VIOLATION_CONCURRENCE) };
    report.push(
        InstanceResult::new("violation-implies-concurrence", violated_verdict)
            .residual(if violated_count == 0 { 0.0 } else { violated_weakest })
            .detail(json!({ "samples": violated_count })),
    );
    report.push(
        InstanceResult::new("scale-invariance", ok(scale_mismatch == 0))
            .detail(json!({ "mismatches": scale_mismatch })),
    );
    Ok(report.finish(start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive() {
        let g = parse_grid("0:0.707:0.05").unwrap();
        assert_eq!(g.len(), 15);
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0.1:0.3:0.1").unwrap().len(), 3);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn bipartition_count() {
        for n in 2..=6 {
            assert_eq!(bipartitions(n).count(), (1 << (n - 1)) - 1);
            assert!(bipartitions(n).all(|(a, b)| a.contains(0) && !b.is_empty()));
        }
    }

    #[test]
    fn bell_pair_is_fully_entangled() {
        let r = check_fully_entangled(&StateVector::bell(), &VerifyOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.instances.len(), 3);
    }

    #[test]
    fn product_state_fails_condition_one() {
        let s = StateVector::bell().tensor(&StateVector::bell()).unwrap();
        let r = check_fully_entangled(&s, &VerifyOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.instance("condition1/{0,1}|{2,3}").unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn graph_purity_set_is_small() {
        let by_class = graph_pair_purities().unwrap();
        assert_eq!(by_class.len(), 6);
        for v in by_class.values().flatten() {
            assert!((v - 0.25).abs() < 1e-12 || (v - 0.5).abs() < 1e-12, "{v}");
        }
    }
}
