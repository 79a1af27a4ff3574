use std::path::PathBuf;

use clap::{Args, ValueEnum};
use graphstate::claims::{
    check_fully_entangled, eq5_sweep, lc_class_partition, lu_inequivalence_scan, parse_grid, verify_corollary1,
    verify_lemma1, verify_pairwise_zero, verify_theorem1, verify_theorem2, ClaimReport, VerifyOptions, TOOL_VERSION,
};
use graphstate::entanglement::{
    certify_zero_tangle, concurrence, negativity, schmidt_coefficients, three_tangle_pure, CertifyOptions,
};
use graphstate::graphs::{can_disconnect_by_lc, to_graph6, LcOrbit};
use graphstate::qstate::{build_graph_state, partial_trace, BIT_CONVENTION};
use graphstate::{DensityMatrix, StateVector, VertexSet};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::input::{family_kind, parse_subset, resolve_state, GraphArgs};
use crate::output::{emit, to_json};

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Output file (stdout when omitted)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn build(args: &BuildArgs) -> Result<(), CliError> {
    let g = args.graph.graph()?;
    let state = build_graph_state(&g)?;
    let doc = json!({
        "tool_version": TOOL_VERSION,
        "graph6": to_graph6(&g),
        "edges": g.edges(),
        "state": state,
    });
    emit(args.output.as_deref(), &to_json(&doc))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Named state instead of a graph: ghzN, wN, plusN, bell, mg4:C
    #[arg(long, conflicts_with = "state_file")]
    pub state: Option<String>,
    /// State JSON written by `build`
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    /// Concurrence of every qubit pair
    #[arg(long)]
    pub pairs: bool,
    /// Three-tangle (pure 3-qubit input) or a decomposition search per triple
    #[arg(long)]
    pub tangle: bool,
    /// Negativity of pair reductions and of each single-qubit cut
    #[arg(long)]
    pub negativity: bool,
    /// Purity of single-qubit and pair reductions
    #[arg(long)]
    pub purity: bool,
    /// Single-qubit reduced density matrices
    #[arg(long)]
    pub singles: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file (stdout when omitted)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
}

/// Negativity of a pure state across `part | rest`: `((sum sigma_i)^2 - 1) / 2`.
fn pure_negativity(s: &StateVector, part: VertexSet) -> Result<f64, CliError> {
    let sum: f64 = schmidt_coefficients(s, part)?.iter().sum();
    Ok(((sum * sum - 1.0) / 2.0).max(0.0))
}

fn rows_of(section: &[Value], measure: &str, key: &str, value: &str) -> Vec<[String; 3]> {
    section.iter().map(|e| [measure.to_string(), e[key].to_string(), e[value].to_string()]).collect()
}

pub fn measure(args: &MeasureArgs) -> Result<(), CliError> {
    let (state, graph) = resolve_state(args.state.as_deref(), args.state_file.as_ref(), &args.graph)?;
    let n = state.num_qubits();
    let all = !(args.pairs || args.tangle || args.negativity || args.purity || args.singles);
    let pairs: Vec<VertexSet> = if n >= 2 { VertexSet::subsets_of_size(n, 2).collect() } else { vec![] };
    let pair_rho: Vec<DensityMatrix> = pairs.iter().map(|&p| partial_trace(&state, p)).collect::<Result<_, _>>()?;
    let mut doc = serde_json::Map::new();
    doc.insert("tool_version".into(), json!(TOOL_VERSION));
    doc.insert("bit_convention".into(), json!(BIT_CONVENTION));
    doc.insert("num_qubits".into(), json!(n));
    if let Some(g) = &graph {
        doc.insert("graph6".into(), json!(to_graph6(g)));
    } else if let Some(name) = &args.state {
        doc.insert("state".into(), json!(name));
    }
    let mut rows: Vec<[String; 3]> = Vec::new();

    if all || args.pairs {
        let section: Vec<Value> = pairs
            .iter()
            .zip(&pair_rho)
            .map(|(p, r)| Ok(json!({ "subset": p, "concurrence": concurrence(r)? })))
            .collect::<Result<_, CliError>>()?;
        rows.extend(rows_of(&section, "concurrence", "subset", "concurrence"));
        doc.insert("pairs".into(), Value::Array(section));
    }
    if (all || args.tangle) && n >= 3 {
        let section: Vec<Value> = if n == 3 {
            vec![json!({ "subset": VertexSet::full(3), "tangle": three_tangle_pure(&state)? })]
        } else {
            let triples: Vec<VertexSet> = VertexSet::subsets_of_size(n, 3).collect();
            triples
                .par_iter()
                .map(|&t| {
                    let rho = partial_trace(&state, t)?;
                    let opts = CertifyOptions { restarts: args.restarts, seed: args.seed, ..CertifyOptions::default() };
                    let out = certify_zero_tangle(&rho, &opts)?;
                    Ok(json!({ "subset": t, "tangle": out.best_value, "upper_bound": true,
                               "certified_zero": out.certificate.is_some() }))
                })
                .collect::<Result<_, CliError>>()?
        };
        rows.extend(rows_of(&section, "tangle", "subset", "tangle"));
        doc.insert("tangles".into(), Value::Array(section));
    }
    if all || args.negativity {
        let mut section = Vec::new();
        for (p, r) in pairs.iter().zip(&pair_rho) {
            let [a, b] = [p.to_vec()[0], p.to_vec()[1]];
            let neg = negativity(r, (VertexSet::singleton(a), VertexSet::singleton(b)))?;
            section.push(json!({ "subset": p, "negativity": neg }));
        }
        if n >= 2 {
            for q in 0..n {
                let part = VertexSet::singleton(q);
                let rest = VertexSet::full(n).difference(part);
                section.push(json!({ "subset": [[q], rest], "negativity": pure_negativity(&state, part)? }));
            }
        }
        rows.extend(rows_of(&section, "negativity", "subset", "negativity"));
        doc.insert("negativities".into(), Value::Array(section));
    }
    if all || args.purity {
        let mut section = Vec::new();
        if n >= 2 {
            for q in 0..n {
                let r = partial_trace(&state, VertexSet::singleton(q))?;
                section.push(json!({ "subset": [q], "purity": r.purity() }));
            }
        }
        for (p, r) in pairs.iter().zip(&pair_rho) {
            section.push(json!({ "subset": p, "purity": r.purity() }));
        }
        rows.extend(rows_of(&section, "purity", "subset", "purity"));
        doc.insert("purities".into(), Value::Array(section));
    }
    if (all || args.singles) && n >= 2 {
        let section: Vec<Value> = (0..n)
            .map(|q| Ok(json!({ "qubit": q, "reduced": partial_trace(&state, VertexSet::singleton(q))? })))
            .collect::<Result<_, CliError>>()?;
        doc.insert("singles".into(), Value::Array(section));
    }

    let text = match args.format {
        Format::Json => to_json(&Value::Object(doc)),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["measure", "subsystem", "value"])?;
            for r in rows {
                w.write_record(&r)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("CSV buffer: {e}")))?;
            String::from_utf8(bytes).expect("CSV output is UTF-8")
        }
    };
    emit(args.output.as_deref(), &text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Claim {
    Lemma1,
    Theorem1,
    Theorem2,
    Corollary1,
    Pairwise,
    LcClasses,
    FullyEntangled,
    Mg4Scan,
    Eq5Sweep,
}

impl Claim {
    fn id(self) -> &'static str {
        match self {
            Claim::Lemma1 => "lemma1",
            Claim::Theorem1 => "theorem1",
            Claim::Theorem2 => "theorem2",
            Claim::Corollary1 => "corollary1",
            Claim::Pairwise => "pairwise",
            Claim::LcClasses => "lc-classes",
            Claim::FullyEntangled => "fully-entangled",
            Claim::Mg4Scan => "mg4-scan",
            Claim::Eq5Sweep => "eq5-sweep",
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub claim: Claim,
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Subset for theorem2, e.g. "0,1,2"
    #[arg(long)]
    pub subset: Option<String>,
    /// Named state for fully-entangled: ghzN, wN, bell, mg4:C
    #[arg(long)]
    pub state: Option<String>,
    /// Grid for mg4-scan as start:end:step (inclusive)
    #[arg(long, default_value = "0:0.707:0.05")]
    pub grid: String,
    /// Sample count for eq5-sweep
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// theorem1 only: check a seeded sample of this many classes
    #[arg(long)]
    pub sample_classes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random restarts per decomposition search
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 400)]
    pub max_sweeps: usize,
    /// Report file name without extension (default: claim id, plus -n<N>)
    #[arg(long)]
    pub stem: Option<String>,
}

fn need_n(args: &VerifyArgs, default: usize) -> usize {
    args.graph.n.unwrap_or(default)
}

pub fn verify(args: &VerifyArgs) -> Result<ClaimReport, CliError> {
    if args.restarts == 0 {
        return Err(CliError::Usage("--restarts must be positive".into()));
    }
    let opts = VerifyOptions { seed: args.seed, restarts: args.restarts, max_sweeps: args.max_sweeps };
    Ok(match args.claim {
        Claim::Lemma1 => verify_lemma1(&opts)?,
        Claim::Theorem1 => verify_theorem1(need_n(args, 5), args.sample_classes, &opts)?,
        Claim::Theorem2 => {
            let subset = args.subset.as_deref().ok_or_else(|| CliError::Usage("theorem2 needs --subset".into()))?;
            verify_theorem2(&args.graph.graph()?, parse_subset(subset)?, &opts)?
        }
        Claim::Corollary1 => {
            let f = args.graph.family.ok_or_else(|| CliError::Usage("corollary1 needs --family".into()))?;
            let n = args.graph.n.ok_or_else(|| CliError::Usage("corollary1 needs --n".into()))?;
            verify_corollary1(family_kind(f, args.graph.tree_seed), n, &opts)?
        }
        Claim::Pairwise => verify_pairwise_zero(need_n(args, 4), &opts)?,
        Claim::LcClasses => lc_class_partition(need_n(args, 4), &opts)?,
        Claim::FullyEntangled => {
            let (state, _) = resolve_state(args.state.as_deref(), None, &args.graph)?;
            check_fully_entangled(&state, &opts)?
        }
        Claim::Mg4Scan => lu_inequivalence_scan(&parse_grid(&args.grid)?, args.seed)?,
        Claim::Eq5Sweep => eq5_sweep(args.samples, args.seed)?,
    })
}

pub fn report_stem(args: &VerifyArgs) -> String {
    if let Some(s) = &args.stem {
        return s.clone();
    }
    match (args.claim, args.graph.n) {
        (Claim::Lemma1 | Claim::Mg4Scan | Claim::Eq5Sweep, _) | (_, None) => args.claim.id().to_string(),
        (_, Some(n)) => format!("{}-n{n}", args.claim.id()),
    }
}

#[derive(Args, Debug)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Find a sequence of local complementations disconnecting this subset
    #[arg(long)]
    pub witness: Option<String>,
    /// Omit the member list
    #[arg(long)]
    pub summary: bool,
    /// Output file (stdout when omitted)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn orbit(args: &OrbitArgs) -> Result<(), CliError> {
    let g = args.graph.graph()?;
    let orbit = LcOrbit::explore(&g)?;
    let mut doc = serde_json::Map::new();
    doc.insert("graph6".into(), json!(to_graph6(&g)));
    doc.insert("size".into(), json!(orbit.len()));
    if !args.summary {
        doc.insert("members".into(), json!(orbit.members().iter().map(to_graph6).collect::<Vec<_>>()));
    }
    if let Some(text) = &args.witness {
        let s = parse_subset(text)?;
        let w = can_disconnect_by_lc(&g, s)?;
        doc.insert(
            "witness".into(),
            json!({
                "subset": s,
                "found": w.is_some(),
                "moves": w.as_ref().map(|w| w.moves.clone()),
                "resulting_graph6": w.as_ref().map(|w| to_graph6(&w.resulting_graph)),
            }),
        );
    }
    emit(args.output.as_deref(), &to_json(&Value::Object(doc)))
}
