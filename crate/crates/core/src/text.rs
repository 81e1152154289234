//! Micro-graph text format.
//!
//! ```text
//! vertex A.1
//! vertex B.1
//! edge A.1 -> B.1
//! edge B.1 -> A.1 eligible
//! edge A.1 <-> B.1
//! roots: B.1
//! ```
//!
//! `vertex` lines come first, then directed edges, then bidirected edges,
//! each block sorted. `eligible` marks unfolded edges outside the canonical
//! graph. A structure ends with a `roots:` line.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{GraphBuilder, MicroVertex, MixedGraph, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct MicroParseError {
    pub line: usize,
    pub message: String,
}

/// Writes `g`; directed edges listed in `eligible` (index pairs) get the
/// `eligible` marker.
pub fn write_micro_graph(g: &MixedGraph, eligible: Option<&BTreeSet<(usize, usize)>>) -> String {
    let mut s = String::new();
    for v in g.vertices() {
        s.push_str(&format!("vertex {v}\n"));
    }
    for (a, b) in g.directed_edges() {
        let mark = if eligible.is_some_and(|e| e.contains(&(a, b))) { " eligible" } else { "" };
        s.push_str(&format!("edge {} -> {}{}\n", g.vertex(a), g.vertex(b), mark));
    }
    for (a, b) in g.bidirected_edges() {
        s.push_str(&format!("edge {} <-> {}\n", g.vertex(a), g.vertex(b)));
    }
    s
}

/// Result of reading the micro-graph format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MicroGraphText {
    pub graph: MixedGraph,
    pub eligible: BTreeSet<(MicroVertex, MicroVertex)>,
    pub roots: Option<VertexSet>,
}

pub fn parse_micro_graph(text: &str) -> Result<MicroGraphText, MicroParseError> {
    let mut vertices = Vec::new();
    let mut directed = Vec::new();
    let mut bidirected = Vec::new();
    let mut eligible = BTreeSet::new();
    let mut roots = None;
    for (ln, line) in text.lines().enumerate() {
        let err = |m: String| MicroParseError { line: ln + 1, message: m };
        let code = line.split('#').next().unwrap_or("");
        let toks: Vec<&str> = code.split_whitespace().collect();
        let vert = |t: &str| t.parse::<MicroVertex>().map_err(|e| err(e.to_string()));
        match toks.as_slice() {
            [] => {}
            ["vertex", v] => vertices.push(vert(v)?),
            ["edge", a, "->", b, rest @ ..] => {
                let (a, b) = (vert(a)?, vert(b)?);
                match rest {
                    [] => {}
                    ["eligible"] => {
                        eligible.insert((a.clone(), b.clone()));
                    }
                    _ => return Err(err("unexpected trailing input".into())),
                }
                directed.push((a, b));
            }
            ["edge", a, "<->", b] => bidirected.push((vert(a)?, vert(b)?)),
            ["roots:", rs @ ..] => {
                roots = Some(rs.iter().map(|r| vert(r)).collect::<Result<VertexSet, _>>()?);
            }
            _ => return Err(err(format!("cannot read `{}`", code.trim()))),
        }
    }
    let mut b = GraphBuilder::new(vertices);
    let fail = |e: crate::graph::GraphError| MicroParseError { line: 0, message: e.to_string() };
    for (u, v) in &directed {
        b.directed(u, v).map_err(fail)?;
    }
    for (u, v) in &bidirected {
        b.bidirected(u, v).map_err(fail)?;
    }
    Ok(MicroGraphText { graph: b.build(), eligible, roots })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "vertex A.1\nvertex A.2\nvertex B.1\nedge A.1 -> B.1\nedge B.1 -> A.2 eligible\nedge A.1 <-> A.2\nroots: A.2\n";
        let m = parse_micro_graph(text).unwrap();
        assert_eq!(m.graph.edge_count(), 3);
        assert_eq!(m.eligible.len(), 1);
        assert_eq!(m.roots.as_ref().unwrap().len(), 1);
        let idx: BTreeSet<(usize, usize)> = m
            .eligible
            .iter()
            .map(|(a, b)| (m.graph.index_of(a).unwrap(), m.graph.index_of(b).unwrap()))
            .collect();
        let out = write_micro_graph(&m.graph, Some(&idx));
        assert_eq!(format!("{out}roots: A.2\n"), text);
    }

    #[test]
    fn unknown_vertex_is_an_error() {
        assert!(parse_micro_graph("vertex A.1\nedge A.1 -> B.1\n").is_err());
        assert!(parse_micro_graph("edge A.1 => B.1\n").is_err());
    }
}
