use std::io::Read;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use graphstate::claims::mg4;
use graphstate::graphs::{family, parse_edge_list, parse_graph6, FamilyKind};
use graphstate::qstate::build_graph_state;
use graphstate::{Graph, StateVector, VertexSet};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Path,
    Complete,
    Star,
    Cycle,
    Tree,
}

/// Where a graph comes from. `-` reads the value from stdin.
#[derive(Args, Clone, Debug, Default)]
pub struct GraphArgs {
    /// graph6 string
    #[arg(long, value_name = "G6", conflicts_with_all = ["edges", "family"])]
    pub graph6: Option<String>,
    /// Edge list, pairs separated by `;` or newlines, e.g. "0 1; 1 2"
    #[arg(long, value_name = "LIST", conflicts_with = "family")]
    pub edges: Option<String>,
    /// Named family; needs --n
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Vertex count for --family (and an explicit count for --edges)
    #[arg(long)]
    pub n: Option<usize>,
    /// Seed for --family tree
    #[arg(long, default_value_t = 0)]
    pub tree_seed: u64,
}

fn read_stdin() -> Result<String, CliError> {
    let mut text = String::new();
    std::io::stdin().read_to_string(&mut text).map_err(CliError::Stdin)?;
    Ok(text)
}

fn stdin_or(value: &str) -> Result<String, CliError> {
    if value == "-" {
        read_stdin()
    } else {
        Ok(value.to_string())
    }
}

/// Edge list when some line holds two tokens or a `;` appears, graph6
/// otherwise.
fn parse_auto(text: &str) -> Result<Graph, CliError> {
    let trimmed = text.trim();
    let looks_like_edges = trimmed.lines().any(|l| l.split_whitespace().count() >= 2) || trimmed.contains(';');
    if looks_like_edges {
        Ok(parse_edge_list(trimmed, None)?)
    } else {
        Ok(parse_graph6(trimmed)?)
    }
}

pub fn family_kind(f: Family, tree_seed: u64) -> FamilyKind {
    match f {
        Family::Path => FamilyKind::Path,
        Family::Complete => FamilyKind::Complete,
        Family::Star => FamilyKind::Star,
        Family::Cycle => FamilyKind::Cycle,
        Family::Tree => FamilyKind::Tree { seed: tree_seed },
    }
}

impl GraphArgs {
    /// Resolves the graph; with no source flag, reads graph6 or an edge
    /// list from stdin.
    pub fn graph(&self) -> Result<Graph, CliError> {
        if let Some(g6) = &self.graph6 {
            return Ok(parse_graph6(stdin_or(g6)?.trim())?);
        }
        if let Some(edges) = &self.edges {
            return Ok(parse_edge_list(&stdin_or(edges)?, self.n)?);
        }
        if let Some(f) = self.family {
            let n = self.n.ok_or_else(|| CliError::Usage("--family needs --n".into()))?;
            return Ok(family(family_kind(f, self.tree_seed), n)?);
        }
        parse_auto(&read_stdin()?)
    }
}

/// A named state: `ghzN`, `wN`, `plusN`, `bell`, or `mg4:C`.
pub fn named_state(name: &str) -> Result<StateVector, CliError> {
    let bad = || CliError::Usage(format!("unknown state '{name}' (expected ghzN, wN, plusN, bell or mg4:C)"));
    if name == "bell" {
        return Ok(StateVector::bell());
    }
    if let Some(c) = name.strip_prefix("mg4:") {
        let c: f64 = c.parse().map_err(|_| bad())?;
        return Ok(mg4(c)?);
    }
    for (prefix, build) in [
        ("ghz", StateVector::ghz as fn(usize) -> Result<StateVector, graphstate::StateError>),
        ("plus", StateVector::plus_state),
        ("w", StateVector::w),
    ] {
        if let Some(rest) = name.strip_prefix(prefix) {
            let n: usize = rest.parse().map_err(|_| bad())?;
            return Ok(build(n)?);
        }
    }
    Err(bad())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StateFile {
    Wrapped { state: StateVector },
    Plain(StateVector),
}

pub fn state_from_file(path: &PathBuf) -> Result<StateVector, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parsed: StateFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: not a state JSON file: {e}", path.display())))?;
    Ok(match parsed {
        StateFile::Wrapped { state } | StateFile::Plain(state) => state,
    })
}

/// State from `--state`, `--state-file`, or else the graph state of the
/// graph arguments.
pub fn resolve_state(
    name: Option<&str>,
    file: Option<&PathBuf>,
    graph: &GraphArgs,
) -> Result<(StateVector, Option<Graph>), CliError> {
    match (name, file) {
        (Some(n), _) => Ok((named_state(n)?, None)),
        (None, Some(f)) => Ok((state_from_file(f)?, None)),
        (None, None) => {
            let g = graph.graph()?;
            Ok((build_graph_state(&g)?, Some(g)))
        }
    }
}

/// Comma- or space-separated vertex labels, e.g. "0,2".
pub fn parse_subset(text: &str) -> Result<VertexSet, CliError> {
    let labels: Vec<usize> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| CliError::Usage(format!("'{t}' is not a vertex label"))))
        .collect::<Result<_, _>>()?;
    if labels.is_empty() {
        return Err(CliError::Usage("empty vertex subset".into()));
    }
    Ok(VertexSet::try_from(labels)?)
}
