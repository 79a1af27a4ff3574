//! Local complementation, LC orbits and disconnection witnesses.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{canonical_form, Graph, VertexSet};
use crate::error::GraphError;

/// Largest n for orbit enumeration.
pub const MAX_ORBIT_VERTICES: usize = 10;

/// Toggles every edge between two distinct neighbours of `a`.
pub fn local_complement(g: &Graph, a: usize) -> Result<Graph, GraphError> {
    let nbhd = g.neighborhood(a)?;
    let mut out = g.clone();
    for b in nbhd.iter() {
        out.adj[b] ^= nbhd.difference(VertexSet::singleton(b)).bits();
    }
    Ok(out)
}

/// A sequence of local complementations and the graph it produces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcWitness {
    pub moves: Vec<usize>,
    pub resulting_graph: Graph,
}

impl LcWitness {
    /// Replays the moves on `source`, failing unless the result matches `resulting_graph`.
    pub fn replay(&self, source: &Graph) -> Result<Graph, GraphError> {
        let mut g = source.clone();
        for &a in &self.moves {
            g = local_complement(&g, a)?;
        }
        if g != self.resulting_graph {
            return Err(GraphError::WitnessMismatch);
        }
        Ok(g)
    }
}

/// Labeled LC orbit explored breadth-first, with enough bookkeeping to
/// recover a shortest move sequence to any member.
#[derive(Clone, Debug)]
pub struct LcOrbit {
    source: Graph,
    order: Vec<Graph>,
    parent: HashMap<Graph, (usize, usize)>,
}

impl LcOrbit {
    pub fn explore(g: &Graph) -> Result<Self, GraphError> {
        if g.n() > MAX_ORBIT_VERTICES {
            return Err(GraphError::Capacity { what: "LC orbit", n: g.n(), max: MAX_ORBIT_VERTICES });
        }
        let mut order = vec![g.clone()];
        let mut parent = HashMap::new();
        let mut index: HashMap<Graph, usize> = HashMap::from([(g.clone(), 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let current = order[i].clone();
            for a in 0..current.n() {
                if current.degree(a) < 2 {
                    continue;
                }
                let next = local_complement(&current, a)?;
                if !index.contains_key(&next) {
                    index.insert(next.clone(), order.len());
                    parent.insert(next.clone(), (i, a));
                    queue.push_back(order.len());
                    order.push(next);
                }
            }
        }
        Ok(LcOrbit { source: g.clone(), order, parent })
    }

    pub fn source(&self) -> &Graph {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Members in breadth-first order, starting with the source.
    pub fn members(&self) -> &[Graph] {
        &self.order
    }

    pub fn contains(&self, g: &Graph) -> bool {
        g == &self.source || self.parent.contains_key(g)
    }

    /// Shortest move sequence from the source to member `idx`.
    pub fn witness_for(&self, idx: usize) -> LcWitness {
        let target = self.order[idx].clone();
        let mut moves = Vec::new();
        let mut cur = &target;
        while let Some(&(p, a)) = self.parent.get(cur) {
            moves.push(a);
            cur = &self.order[p];
        }
        moves.reverse();
        LcWitness { moves, resulting_graph: target }
    }

    /// First member (in BFS order) whose subgraph induced by `s` is disconnected.
    pub fn find_disconnecting(&self, s: VertexSet) -> Option<LcWitness> {
        self.order.iter().position(|g| !g.is_connected_within(s)).map(|idx| self.witness_for(idx))
    }
}

/// Closure of `{g}` under local complementation, deduplicated by labeled adjacency.
pub fn lc_orbit(g: &Graph) -> Result<BTreeSet<Graph>, GraphError> {
    Ok(LcOrbit::explore(g)?.order.into_iter().collect())
}

/// The orbit collapsed under isomorphism: canonical forms of all members.
pub fn lc_orbit_classes(g: &Graph) -> Result<BTreeSet<Graph>, GraphError> {
    LcOrbit::explore(g)?.order.iter().map(canonical_form).collect()
}

/// Searches the LC orbit of `g` for a member whose subgraph induced by `s`
/// is disconnected.
pub fn can_disconnect_by_lc(g: &Graph, s: VertexSet) -> Result<Option<LcWitness>, GraphError> {
    check_subset_size(g, s)?;
    if !g.is_connected_within(s) {
        return Ok(Some(LcWitness { moves: Vec::new(), resulting_graph: g.clone() }));
    }
    Ok(LcOrbit::explore(g)?.find_disconnecting(s))
}

pub(crate) fn check_subset_size(g: &Graph, s: VertexSet) -> Result<(), GraphError> {
    g.check_subset(s)?;
    let max = g.n().saturating_sub(1);
    if s.len() < 2 || s.len() > max {
        return Err(GraphError::SubsetSize { size: s.len(), min: 2, max });
    }
    Ok(())
}
