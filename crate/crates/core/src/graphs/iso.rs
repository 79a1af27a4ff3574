//! Isomorphism testing, canonical labels and enumeration of small connected graphs.

use std::collections::BTreeSet;

use itertools::Itertools;

use super::{Graph, VertexSet};
use crate::error::GraphError;

/// Largest n for brute-force isomorphism (n! permutations).
pub const MAX_ISO_VERTICES: usize = 8;
/// Largest n for canonical labeling.
pub const MAX_CANON_VERTICES: usize = 10;
/// Largest n for [`enumerate_connected_graphs`].
pub const MAX_ENUM_VERTICES: usize = 7;

/// A vertex relabeling mapping `g1` onto `g2`, found by brute force.
pub fn isomorphism(g1: &Graph, g2: &Graph) -> Result<Option<Vec<usize>>, GraphError> {
    let n = g1.n();
    if n > MAX_ISO_VERTICES || g2.n() > MAX_ISO_VERTICES {
        return Err(GraphError::Capacity { what: "isomorphism", n: n.max(g2.n()), max: MAX_ISO_VERTICES });
    }
    if n != g2.n() || g1.edge_count() != g2.edge_count() {
        return Ok(None);
    }
    let mut d1: Vec<usize> = (0..n).map(|v| g1.degree(v)).collect();
    let mut d2: Vec<usize> = (0..n).map(|v| g2.degree(v)).collect();
    d1.sort_unstable();
    d2.sort_unstable();
    if d1 != d2 {
        return Ok(None);
    }
    let edges = g1.edges();
    for perm in (0..n).permutations(n) {
        if (0..n).any(|v| g1.degree(v) != g2.degree(perm[v])) {
            continue;
        }
        if edges.iter().all(|&(a, b)| g2.has_edge(perm[a], perm[b])) {
            return Ok(Some(perm));
        }
    }
    Ok(None)
}

pub fn are_isomorphic(g1: &Graph, g2: &Graph) -> Result<bool, GraphError> {
    Ok(isomorphism(g1, g2)?.is_some())
}

/// Upper triangle bits in graph6 order; smaller code = canonical choice.
fn code(g: &Graph) -> u128 {
    let mut c = 0u128;
    for j in 1..g.n() {
        for i in 0..j {
            c = c << 1 | g.has_edge(i, j) as u128;
        }
    }
    c
}

/// Colour refinement starting from degrees. Colours are ranks of canonical
/// signatures, so isomorphic graphs get matching colour multisets.
fn refined_colors(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut colors: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = VertexSet::from_bits(g.row(v)).iter().map(|u| colors[u]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let uniq: Vec<&(usize, Vec<usize>)> = sigs.iter().collect::<BTreeSet<_>>().into_iter().collect();
        let next: Vec<usize> = sigs.iter().map(|s| uniq.binary_search(&s).expect("present")).collect();
        let classes_before = colors.iter().collect::<BTreeSet<_>>().len();
        if uniq.len() == classes_before {
            return next;
        }
        colors = next;
    }
}

/// Canonical representative of the isomorphism class of `g`: the relabeling
/// with the smallest graph6 bit code among colour-respecting orderings.
pub fn canonical_form(g: &Graph) -> Result<Graph, GraphError> {
    let n = g.n();
    if n > MAX_CANON_VERTICES {
        return Err(GraphError::Capacity { what: "canonical form", n, max: MAX_CANON_VERTICES });
    }
    let colors = refined_colors(g);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for c in colors.iter().copied().collect::<BTreeSet<_>>() {
        blocks.push((0..n).filter(|&v| colors[v] == c).collect());
    }
    let mut best: Option<(u128, Graph)> = None;
    let block_perms = blocks.iter().map(|b| b.iter().copied().permutations(b.len()).collect::<Vec<_>>());
    for choice in block_perms.multi_cartesian_product() {
        // position -> original vertex
        let order: Vec<usize> = choice.into_iter().flatten().collect();
        let mut perm = vec![0; n];
        for (pos, &v) in order.iter().enumerate() {
            perm[v] = pos;
        }
        let h = g.permuted(&perm);
        let c = code(&h);
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, h));
        }
    }
    // multi_cartesian_product of zero iterators yields nothing; only n = 0 hits that.
    Ok(best.map(|(_, h)| h).unwrap_or_else(|| g.clone()))
}

/// One representative (in canonical form) per isomorphism class of connected
/// graphs on `n` vertices, sorted by edge count then bit code.
pub fn enumerate_connected_graphs(n: usize) -> Result<Vec<Graph>, GraphError> {
    if n == 0 {
        return Err(GraphError::NoVertices);
    }
    if n > MAX_ENUM_VERTICES {
        return Err(GraphError::Capacity { what: "enumeration", n, max: MAX_ENUM_VERTICES });
    }
    let mut layer = vec![Graph::empty(1)?];
    for m in 2..=n {
        // Every connected graph has a vertex whose removal keeps it connected
        // (a leaf of a spanning tree), so it extends some connected graph on m - 1.
        let mut next = BTreeSet::new();
        for base in &layer {
            for mask in 1u16..(1 << (m - 1)) {
                let mut adj: Vec<u16> = (0..m - 1).map(|v| base.row(v)).collect();
                for v in VertexSet::from_bits(mask).iter() {
                    adj[v] |= 1 << (m - 1);
                }
                adj.push(mask);
                let g = Graph::from_adjacency(adj)?;
                let canon = canonical_form(&g)?;
                next.insert((canon.edge_count(), code(&canon), canon));
            }
        }
        layer = next.into_iter().map(|(_, _, g)| g).collect();
    }
    Ok(layer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{family, FamilyKind};

    #[test]
    fn stars_and_paths() {
        let s0 = family(FamilyKind::Star, 4).unwrap();
        let s2 = Graph::from_edges(4, &[(2, 0), (2, 1), (2, 3)]).unwrap();
        assert!(are_isomorphic(&s0, &s2).unwrap());
        let p4 = family(FamilyKind::Path, 4).unwrap();
        assert!(!are_isomorphic(&p4, &s0).unwrap());
        let perm = isomorphism(&s0, &s2).unwrap().unwrap();
        assert_eq!(s0.permuted(&perm), s2);
        assert!(isomorphism(&Graph::empty(9).unwrap(), &Graph::empty(9).unwrap()).is_err());
    }

    #[test]
    fn class_counts() {
        assert_eq!(enumerate_connected_graphs(1).unwrap().len(), 1);
        assert_eq!(enumerate_connected_graphs(2).unwrap().len(), 1);
        assert_eq!(enumerate_connected_graphs(3).unwrap().len(), 2);
        assert_eq!(enumerate_connected_graphs(4).unwrap().len(), 6);
        assert!(enumerate_connected_graphs(8).is_err());
    }

    /// Independent oracle: all labeled graphs on n vertices, connected ones
    /// grouped by brute-force isomorphism.
    fn brute_force_classes(n: usize) -> Vec<Graph> {
        let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
        let mut reps: Vec<Graph> = Vec::new();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            let g = Graph::from_edges(n, &edges).unwrap();
            if g.is_connected() && !reps.iter().any(|r| are_isomorphic(r, &g).unwrap()) {
                reps.push(g);
            }
        }
        reps
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for n in 1..=5 {
            let oracle = brute_force_classes(n);
            let fast = enumerate_connected_graphs(n).unwrap();
            assert_eq!(oracle.len(), fast.len(), "n = {n}");
            for g in &oracle {
                assert_eq!(fast.iter().filter(|h| are_isomorphic(g, h).unwrap()).count(), 1);
            }
        }
    }

    #[test]
    fn canonical_form_is_label_invariant() {
        for g in enumerate_connected_graphs(5).unwrap() {
            let c = canonical_form(&g).unwrap();
            for perm in (0..5).permutations(5).step_by(7) {
                assert_eq!(canonical_form(&g.permuted(&perm)).unwrap(), c);
            }
        }
    }

    #[test]
    fn isomorphism_is_an_equivalence_on_four_vertices() {
        let pairs: Vec<(usize, usize)> = (0..4).tuple_combinations().collect();
        let all: Vec<Graph> = (0u32..64)
            .map(|mask| {
                let edges: Vec<_> =
                    pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
                Graph::from_edges(4, &edges).unwrap()
            })
            .collect();
        let iso = |a: &Graph, b: &Graph| are_isomorphic(a, b).unwrap();
        for a in &all {
            assert!(iso(a, a));
            for b in &all {
                assert_eq!(iso(a, b), iso(b, a));
                if iso(a, b) {
                    for c in &all {
                        if iso(b, c) {
                            assert!(iso(a, c));
                        }
                    }
                }
                assert_eq!(iso(a, b), canonical_form(a).unwrap() == canonical_form(b).unwrap());
            }
        }
    }
}
