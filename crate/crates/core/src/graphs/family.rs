use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::GraphError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum FamilyKind {
    Path,
    Complete,
    Star,
    Cycle,
    /// Uniformly random labeled tree decoded from a seeded Prüfer sequence.
    Tree {
        seed: u64,
    },
}

pub fn family(kind: FamilyKind, n: usize) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::TooFewVertices { n, min: 2 });
    }
    let mut g = Graph::empty(n)?;
    match kind {
        FamilyKind::Path => (1..n).for_each(|v| g.toggle_edge(v - 1, v)),
        FamilyKind::Complete => {
            for a in 0..n {
                for b in a + 1..n {
                    g.toggle_edge(a, b);
                }
            }
        }
        FamilyKind::Star => (1..n).for_each(|v| g.toggle_edge(0, v)),
        FamilyKind::Cycle => {
            (1..n).for_each(|v| g.toggle_edge(v - 1, v));
            if n > 2 {
                g.toggle_edge(0, n - 1);
            }
        }
        FamilyKind::Tree { seed } => {
            for (a, b) in prufer_tree(n, seed) {
                g.toggle_edge(a, b);
            }
        }
    }
    Ok(g)
}

fn prufer_tree(n: usize, seed: u64) -> Vec<(usize, usize)> {
    if n == 2 {
        return vec![(0, 1)];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf always remains");
        edges.push((leaf.min(v), leaf.max(v)));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}
