//! SGF, a line-oriented text format for signed graphs.
//!
//! ```text
//! # comment
//! v 3
//! e 0 1 +
//! e 1 2 -
//! e 2 0 +
//! ```
//!
//! `v <n>` declares vertices `0..n`; every `e` line declares the next edge id.

use std::fmt::Write as _;

use crate::error::ParseError;
use crate::graph::{Edge, Sign, SignedGraph};

pub fn parse_sgf(text: &str) -> Result<SignedGraph, ParseError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "v" => {
                if n.is_some() {
                    return Err(ParseError::new(line_no, "vertex count declared twice"));
                }
                if fields.len() != 2 {
                    return Err(ParseError::new(line_no, "expected `v <n>`"));
                }
                let count = fields[1]
                    .parse::<usize>()
                    .map_err(|_| ParseError::new(line_no, format!("bad vertex count `{}`", fields[1])))?;
                n = Some(count);
            }
            "e" => {
                let count = n.ok_or_else(|| ParseError::new(line_no, "edge before `v` line"))?;
                if fields.len() != 4 {
                    return Err(ParseError::new(line_no, "expected `e <u> <v> <+|->`"));
                }
                let mut ends = [0usize; 2];
                for (slot, field) in ends.iter_mut().zip(&fields[1..3]) {
                    let v = field
                        .parse::<usize>()
                        .map_err(|_| ParseError::new(line_no, format!("bad vertex `{field}`")))?;
                    if v >= count {
                        return Err(ParseError::new(
                            line_no,
                            format!("vertex {v} out of range 0..{count}"),
                        ));
                    }
                    *slot = v;
                }
                let sign = match fields[3] {
                    "+" => Sign::Positive,
                    "-" => Sign::Negative,
                    other => return Err(ParseError::new(line_no, format!("bad sign `{other}`"))),
                };
                edges.push(Edge::new(edges.len(), ends[0], ends[1], sign));
            }
            other => return Err(ParseError::new(line_no, format!("unknown directive `{other}`"))),
        }
    }
    let n = n.ok_or_else(|| ParseError::new(0, "missing `v <n>` line"))?;
    Ok(SignedGraph::new(n, edges).expect("parser validated endpoints"))
}

/// Writes `g` in SGF. Edges are emitted in id order; SGF ids are implicit,
/// so a graph with gaps in its ids reads back renumbered `0..m`.
pub fn write_sgf(g: &SignedGraph) -> String {
    let mut out = String::new();
    writeln!(out, "v {}", g.vertex_count()).unwrap();
    for e in g.edges() {
        writeln!(out, "e {} {} {}", e.a, e.b, e.sign.symbol()).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments() {
        let g = parse_sgf("# triangle\nv 3\n\ne 0 1 +\ne 1 2 - # neg\ne 2 0 +\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.negative_count(), 1);
        assert_eq!(parse_sgf(&write_sgf(&g)).unwrap(), g);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_sgf("v 2\ne 0 1 +\ne 0 5 +\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_sgf("v 2\ne 0 1 *\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_sgf("v 2\nx 0 1\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("unknown directive"));
        let err = parse_sgf("e 0 1 +\n").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn missing_header_is_an_error() {
        assert!(parse_sgf("# nothing\n").is_err());
    }
}
