//! Plain-text edge lists: one "u v" pair per line, 0-indexed, sorted
//! ascending by (u, v). The shared on-disk format between growth, the
//! spatial simulation and the analysis tools.

use crate::growth::{Graph, GrowthError};
use std::io::{BufRead, Write};

/// Write a graph's edges in canonical order.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> std::io::Result<()> {
    for (u, v) in graph.sorted_edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

/// Write raw edges (already normalized u < v elsewhere is not assumed).
pub fn write_edges<W: Write>(edges: &[(usize, usize)], mut out: W) -> std::io::Result<()> {
    let mut sorted: Vec<(usize, usize)> =
        edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    sorted.sort_unstable();
    for (u, v) in sorted {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

/// Parse an edge list. Node count is the largest id + 1; blank lines and
/// lines starting with '#' are skipped.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph, GrowthError> {
    let mut edges = Vec::new();
    let mut max_node = 0usize;
    for (line_no, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| GrowthError::MalformedEdges(format!("io error: {e}")))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<usize, GrowthError> {
            tok.ok_or_else(|| {
                GrowthError::MalformedEdges(format!("line {}: expected two node ids", line_no + 1))
            })?
            .parse::<usize>()
            .map_err(|_| {
                GrowthError::MalformedEdges(format!("line {}: invalid node id", line_no + 1))
            })
        };
        let u = parse(parts.next())?;
        let v = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(GrowthError::MalformedEdges(format!(
                "line {}: trailing tokens",
                line_no + 1
            )));
        }
        max_node = max_node.max(u).max(v);
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(GrowthError::MalformedEdges("no edges found".into()));
    }
    Graph::from_edges(max_node + 1, &edges)
}
