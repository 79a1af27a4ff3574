//! graph6 and plain edge-list text formats.
//!
//! graph6 for `n <= 62`: one header byte `n + 63`, then the upper triangle of
//! the adjacency matrix in column-major order (`x(0,1), x(0,2), x(1,2),
//! x(0,3), ...`) packed big-endian into 6-bit groups, each offset by 63.

use super::{Graph, MAX_VERTICES};
use crate::error::GraphError;

const OFFSET: u8 = 63;

fn payload_len(n: usize) -> usize {
    (n * n.saturating_sub(1) / 2).div_ceil(6)
}

pub fn parse_graph6(text: &str) -> Result<Graph, GraphError> {
    let mut bytes = text.trim_end_matches(['\n', '\r']).as_bytes();
    if let Some(rest) = bytes.strip_prefix(b">>graph6<<") {
        bytes = rest;
    }
    let (&head, rest) = bytes.split_first().ok_or(GraphError::Graph6Empty)?;
    if !(OFFSET..=126).contains(&head) {
        return Err(GraphError::Graph6Byte { pos: 0, byte: head });
    }
    if head == 126 {
        // n >= 63 uses a multi-byte header, always beyond capacity here.
        let n = decode_long_header(rest)?;
        return Err(GraphError::Capacity { what: "graph6", n, max: MAX_VERTICES });
    }
    let n = (head - OFFSET) as usize;
    if n == 0 {
        return Err(GraphError::NoVertices);
    }
    if n > MAX_VERTICES {
        return Err(GraphError::Capacity { what: "graph6", n, max: MAX_VERTICES });
    }
    let expected = payload_len(n);
    if rest.len() < expected {
        return Err(GraphError::Graph6Truncated { expected, found: rest.len() });
    }
    if rest.len() > expected {
        return Err(GraphError::Graph6Trailing { extra: rest.len() - expected });
    }
    for (i, &b) in rest.iter().enumerate() {
        if !(OFFSET..=126).contains(&b) {
            return Err(GraphError::Graph6Byte { pos: i + 1, byte: b });
        }
    }

    let bit = |k: usize| -> bool {
        let chunk = rest[k / 6] - OFFSET;
        chunk >> (5 - k % 6) & 1 == 1
    };
    let mut g = Graph::empty(n)?;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                g.toggle_edge(i, j);
            }
            k += 1;
        }
    }
    Ok(g)
}

fn decode_long_header(rest: &[u8]) -> Result<usize, GraphError> {
    let (digits, width) = match rest.first() {
        Some(126) => (&rest[1..], 6),
        _ => (rest, 3),
    };
    if digits.len() < width {
        return Err(GraphError::Graph6Truncated { expected: width + 1, found: rest.len() + 1 });
    }
    let mut n = 0usize;
    for &b in &digits[..width] {
        n = n << 6 | b.wrapping_sub(OFFSET) as usize;
    }
    Ok(n)
}

/// Canonical graph6 encoding (no `>>graph6<<` header, no newline).
pub fn to_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out = Vec::with_capacity(1 + payload_len(n));
    out.push(OFFSET + n as u8);
    let mut chunk = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            chunk = chunk << 1 | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(OFFSET + chunk);
                chunk = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push(OFFSET + (chunk << (6 - filled)));
    }
    String::from_utf8(out).expect("graph6 bytes are printable ASCII")
}

/// Parses an edge list: one `a b` pair per line (`;` also separates pairs),
/// `#` starts a comment. The vertex count is `n` when given, otherwise one
/// more than the largest label seen.
pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        for item in line.split(';') {
            let fields: Vec<&str> =
                item.split(|c: char| c.is_whitespace() || c == ',').filter(|f| !f.is_empty()).collect();
            match fields.as_slice() {
                [] => {}
                [a, b] => {
                    let parse = |f: &str| {
                        f.parse::<usize>().map_err(|_| GraphError::EdgeList {
                            line: line_no,
                            msg: format!("'{f}' is not a vertex index"),
                        })
                    };
                    edges.push((parse(a)?, parse(b)?, line_no));
                }
                _ => {
                    return Err(GraphError::EdgeList {
                        line: line_no,
                        msg: format!("expected two vertex indices, found '{}'", item.trim()),
                    })
                }
            }
        }
    }
    let inferred = edges.iter().map(|&(a, b, _)| a.max(b) + 1).max().unwrap_or(1);
    let n = n.unwrap_or(inferred);
    let mut g = Graph::empty(n)?;
    for (a, b, line) in edges {
        g.add_edge(a, b).map_err(|e| GraphError::EdgeList { line, msg: e.to_string() })?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{family, FamilyKind};

    #[test]
    fn decodes_reference_strings() {
        let k4 = parse_graph6("C~").unwrap();
        assert_eq!(k4, family(FamilyKind::Complete, 4).unwrap());
        let single = parse_graph6("@").unwrap();
        assert_eq!(single.n(), 1);
        assert_eq!(single.edge_count(), 0);
        assert_eq!(parse_graph6("C?").unwrap().edge_count(), 0);
        // P4 0-1-2-3: bits x01=1 x02=0 x12=1 x03=0 x13=0 x23=1 -> 101001 = 41 -> 'h'
        assert_eq!(parse_graph6("Ch").unwrap(), family(FamilyKind::Path, 4).unwrap());
        assert_eq!(parse_graph6(">>graph6<<C~\n").unwrap(), k4);
    }

    #[test]
    fn encodes_reference_graphs() {
        assert_eq!(to_graph6(&family(FamilyKind::Complete, 4).unwrap()), "C~");
        assert_eq!(to_graph6(&Graph::empty(4).unwrap()), "C?");
        let p2 = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(parse_graph6(&to_graph6(&p2)).unwrap().edge_count(), 1);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(parse_graph6(""), Err(GraphError::Graph6Empty)));
        assert!(matches!(parse_graph6(" ~"), Err(GraphError::Graph6Byte { pos: 0, .. })));
        assert!(matches!(parse_graph6("C"), Err(GraphError::Graph6Truncated { expected: 1, found: 0 })));
        assert!(matches!(parse_graph6("C~~"), Err(GraphError::Graph6Trailing { extra: 1 })));
        assert!(matches!(parse_graph6("C\x7f"), Err(GraphError::Graph6Byte { pos: 1, .. })));
        // 17 vertices
        assert!(matches!(parse_graph6("P"), Err(GraphError::Capacity { n: 17, .. })));
        // 63 vertices in the long header
        assert!(matches!(parse_graph6("~??~"), Err(GraphError::Capacity { n: 63, .. })));
    }

    #[test]
    fn edge_lists() {
        let g = parse_edge_list("0 1", None).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edges(), vec![(0, 1)]);
        let g = parse_edge_list("# path\n0 1\n1 2; 2 3\n", None).unwrap();
        assert_eq!(g, family(FamilyKind::Path, 4).unwrap());
        let g = parse_edge_list("0 1", Some(5)).unwrap();
        assert_eq!(g.n(), 5);
        assert!(matches!(parse_edge_list("0 1\n2 x", None), Err(GraphError::EdgeList { line: 2, .. })));
        assert!(matches!(parse_edge_list("1 1", None), Err(GraphError::EdgeList { line: 1, .. })));
    }
}
