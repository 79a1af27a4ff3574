//! Simple undirected graphs on at most 16 vertices.
//!
//! Adjacency is stored as one `u16` bitmask per vertex, so subsets of the
//! vertex range are plain bitmasks as well ([`VertexSet`]). Everything here is
//! a pure function of immutable values.

mod family;
mod graph6;
mod iso;
mod lc;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use family::{family, FamilyKind};
pub use graph6::{parse_edge_list, parse_graph6, to_graph6};
pub use iso::{are_isomorphic, canonical_form, enumerate_connected_graphs, isomorphism};
pub use lc::{can_disconnect_by_lc, lc_orbit, lc_orbit_classes, local_complement, LcOrbit, LcWitness};

pub(crate) use lc::check_subset_size;

use crate::error::GraphError;

/// Largest vertex count a [`Graph`] can hold.
pub const MAX_VERTICES: usize = 16;

/// A subset of `0..n` stored as a bitmask; bit `v` set means `v` is a member.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct VertexSet(u16);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn from_bits(bits: u16) -> Self {
        VertexSet(bits)
    }

    /// All vertices `0..n`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_VERTICES);
        if n == MAX_VERTICES {
            VertexSet(u16::MAX)
        } else {
            VertexSet(((1u32 << n) - 1) as u16)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1 << v)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, v: usize) -> bool {
        v < MAX_VERTICES && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1 << v);
    }

    pub fn union(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Every subset of `0..n` with exactly `k` members, in increasing bitmask order.
    pub fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = VertexSet> {
        let limit = 1u32 << n;
        (0..limit).filter(move |bits| bits.count_ones() as usize == k).map(|bits| VertexSet(bits as u16))
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = VertexSet::EMPTY;
        for v in iter {
            set.insert(v);
        }
        set
    }
}

impl From<VertexSet> for Vec<usize> {
    fn from(set: VertexSet) -> Self {
        set.to_vec()
    }
}

impl TryFrom<Vec<usize>> for VertexSet {
    type Error = GraphError;

    fn try_from(members: Vec<usize>) -> Result<Self, Self::Error> {
        VertexSet::try_from(members.as_slice())
    }
}

impl TryFrom<&[usize]> for VertexSet {
    type Error = GraphError;

    fn try_from(members: &[usize]) -> Result<Self, Self::Error> {
        let mut set = VertexSet::EMPTY;
        for &v in members {
            if v >= MAX_VERTICES {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: MAX_VERTICES });
            }
            set.insert(v);
        }
        Ok(set)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Simple undirected graph with dense vertex labels `0..n`.
///
/// Equality, ordering and hashing are by exact labeled adjacency.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    n: usize,
    adj: Vec<u16>,
}

impl Graph {
    /// Graph on `n` vertices without edges.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        if n > MAX_VERTICES {
            return Err(GraphError::Capacity { what: "graph", n, max: MAX_VERTICES });
        }
        Ok(Graph { n, adj: vec![0; n] })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n)?;
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Builds a graph from per-vertex neighbor bitmasks, checking symmetry
    /// and the empty diagonal.
    pub fn from_adjacency(adj: Vec<u16>) -> Result<Self, GraphError> {
        let g = Graph { n: adj.len(), adj };
        if g.n == 0 {
            return Err(GraphError::NoVertices);
        }
        if g.n > MAX_VERTICES {
            return Err(GraphError::Capacity { what: "graph", n: g.n, max: MAX_VERTICES });
        }
        let range = VertexSet::full(g.n).bits();
        for a in 0..g.n {
            if g.adj[a] & !range != 0 || g.adj[a] >> a & 1 == 1 {
                return Err(GraphError::InvalidAdjacency(a));
            }
            for b in VertexSet::from_bits(g.adj[a]).iter() {
                if g.adj[b] >> a & 1 == 0 {
                    return Err(GraphError::InvalidAdjacency(a));
                }
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        self.adj[a] |= 1 << b;
        self.adj[b] |= 1 << a;
        Ok(())
    }

    pub fn toggle_edge(&mut self, a: usize, b: usize) {
        debug_assert!(a != b && a < self.n && b < self.n);
        self.adj[a] ^= 1 << b;
        self.adj[b] ^= 1 << a;
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.adj[a] >> b & 1 == 1
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in VertexSet::from_bits(self.adj[a]).iter().filter(|&b| b > a) {
                out.push((a, b));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn degree(&self, a: usize) -> usize {
        self.adj[a].count_ones() as usize
    }

    pub(crate) fn row(&self, a: usize) -> u16 {
        self.adj[a]
    }

    pub(crate) fn check_vertex(&self, a: usize) -> Result<(), GraphError> {
        if a >= self.n {
            Err(GraphError::VertexOutOfRange { vertex: a, n: self.n })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_subset(&self, s: VertexSet) -> Result<(), GraphError> {
        if !s.is_subset(self.vertices()) {
            let bad = s.difference(self.vertices()).first().unwrap_or(0);
            return Err(GraphError::VertexOutOfRange { vertex: bad, n: self.n });
        }
        Ok(())
    }

    /// The vertices adjacent to `a`.
    pub fn neighborhood(&self, a: usize) -> Result<VertexSet, GraphError> {
        self.check_vertex(a)?;
        Ok(VertexSet::from_bits(self.adj[a]))
    }

    /// Vertices reachable from `start` inside `within` (which must contain `start`).
    pub(crate) fn component_within(&self, start: usize, within: VertexSet) -> VertexSet {
        let mut seen = VertexSet::singleton(start);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = VertexSet::EMPTY;
            for v in frontier.iter() {
                next = next.union(VertexSet::from_bits(self.adj[v]));
            }
            frontier = next.intersection(within).difference(seen);
            seen = seen.union(frontier);
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        self.component_within(0, self.vertices()) == self.vertices()
    }

    /// Whether the subgraph induced by `s` is connected. Empty `s` counts as connected.
    pub fn is_connected_within(&self, s: VertexSet) -> bool {
        match s.first() {
            None => true,
            Some(v) => self.component_within(v, s) == s,
        }
    }

    /// Connected components of the subgraph induced by `s`, ordered by smallest member.
    pub fn components_within(&self, s: VertexSet) -> Vec<VertexSet> {
        let mut rest = s;
        let mut out = Vec::new();
        while let Some(v) = rest.first() {
            let comp = self.component_within(v, rest);
            out.push(comp);
            rest = rest.difference(comp);
        }
        out
    }

    /// Subgraph induced by `s`, relabeled densely in ascending order. The
    /// second value maps new labels back to the original vertices.
    pub fn induced_subgraph(&self, s: VertexSet) -> Result<(Graph, Vec<usize>), GraphError> {
        if s.is_empty() {
            return Err(GraphError::EmptySubset);
        }
        self.check_subset(s)?;
        let map = s.to_vec();
        let mut adj = vec![0u16; map.len()];
        for (i, &a) in map.iter().enumerate() {
            for (j, &b) in map.iter().enumerate() {
                if self.has_edge(a, b) {
                    adj[i] |= 1 << j;
                }
            }
        }
        Ok((Graph { n: map.len(), adj }, map))
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let mut adj = vec![0u16; self.n];
        for (a, b) in self.edges() {
            adj[perm[a]] |= 1 << perm[b];
            adj[perm[b]] |= 1 << perm[a];
        }
        Graph { n: self.n, adj }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_graph6(self))
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&to_graph6(self))
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_graph6(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    fn path4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn neighborhoods() {
        assert_eq!(star4().neighborhood(0).unwrap().to_vec(), vec![1, 2, 3]);
        assert_eq!(star4().neighborhood(1).unwrap().to_vec(), vec![0]);
        assert_eq!(path4().neighborhood(1).unwrap().to_vec(), vec![0, 2]);
        assert!(matches!(path4().neighborhood(4), Err(GraphError::VertexOutOfRange { vertex: 4, n: 4 })));
    }

    #[test]
    fn connectivity() {
        assert!(path4().is_connected());
        let two_edges = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(!two_edges.is_connected());
        assert_eq!(two_edges.components_within(two_edges.vertices()).len(), 2);
        assert!(Graph::empty(1).unwrap().is_connected());
    }

    #[test]
    fn induced_subgraphs() {
        let k4 = family(FamilyKind::Complete, 4).unwrap();
        let (k3, map) = k4.induced_subgraph([0, 1, 2].into_iter().collect()).unwrap();
        assert_eq!(k3, family(FamilyKind::Complete, 3).unwrap());
        assert_eq!(map, vec![0, 1, 2]);

        let (leaves, _) = star4().induced_subgraph([1, 2, 3].into_iter().collect()).unwrap();
        assert_eq!(leaves.edge_count(), 0);

        let (frag, map) = path4().induced_subgraph([0, 1, 3].into_iter().collect()).unwrap();
        assert_eq!(frag.edges(), vec![(0, 1)]);
        assert_eq!(map, vec![0, 1, 3]);

        assert!(matches!(path4().induced_subgraph(VertexSet::EMPTY), Err(GraphError::EmptySubset)));
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(matches!(Graph::empty(17), Err(GraphError::Capacity { .. })));
        assert!(matches!(Graph::from_edges(3, &[(1, 1)]), Err(GraphError::SelfLoop(1))));
        assert!(Graph::from_adjacency(vec![0b10, 0b00]).is_err());
        assert!(Graph::from_adjacency(vec![0b10, 0b01]).is_ok());
    }

    #[test]
    fn vertex_set_basics() {
        let s: VertexSet = [3, 1, 4].into_iter().collect();
        assert_eq!(s.to_vec(), vec![1, 3, 4]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.to_string(), "{1,3,4}");
        assert_eq!(VertexSet::subsets_of_size(5, 2).count(), 10);
        assert_eq!(VertexSet::full(16).len(), 16);
    }
}
