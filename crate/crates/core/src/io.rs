//! Plain-text formats.
//!
//! Graphs and configurations are edge lists: a header line `n=<int>` followed
//! by one `<i> <j>` line per edge with `1 <= i < j <= n` (ranks are 1-based on
//! disk). Capacities are one integer per line, in rank order. Blank lines and
//! `#` comments are ignored when reading.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::AcceptanceGraph;
use crate::model::{Configuration, SlotCapacities};

pub fn format_edge_list(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> String {
    let mut out = format!("n={n}\n");
    for (p, q) in edges {
        let (a, b) = if p < q { (p, q) } else { (q, p) };
        writeln!(out, "{} {}", a + 1, b + 1).expect("writing to a String");
    }
    out
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(no, l)| (no + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses an edge list into `n` and 0-based pairs.
pub fn parse_edge_list(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut lines = content_lines(text);
    let (no, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `n=` header"))?;
    let n: usize = header
        .strip_prefix("n=")
        .ok_or_else(|| Error::parse(no, "expected `n=<int>` header"))?
        .trim()
        .parse()
        .map_err(|e| Error::parse(no, format!("peer count: {e}")))?;
    let mut edges = Vec::new();
    for (no, line) in lines {
        let cols: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = cols[..] else {
            return Err(Error::parse(no, "expected `<i> <j>`"));
        };
        let parse = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|e| Error::parse(no, format!("rank `{s}`: {e}")))
        };
        let (i, j) = (parse(a)?, parse(b)?);
        if !(1 <= i && i < j && j <= n) {
            return Err(Error::parse(
                no,
                format!("need 1 <= i < j <= {n}, got {i} {j}"),
            ));
        }
        edges.push((i - 1, j - 1));
    }
    Ok((n, edges))
}

pub fn parse_graph(text: &str) -> Result<AcceptanceGraph> {
    let (n, edges) = parse_edge_list(text)?;
    AcceptanceGraph::from_edges(n, edges)
}

pub fn parse_configuration(text: &str) -> Result<Configuration> {
    let (n, edges) = parse_edge_list(text)?;
    Configuration::from_edges(n, edges)
}

pub fn format_graph(g: &AcceptanceGraph) -> String {
    format_edge_list(g.n(), g.edges())
}

pub fn format_configuration(c: &Configuration) -> String {
    format_edge_list(c.n(), c.edges())
}

pub fn parse_capacities(text: &str) -> Result<SlotCapacities> {
    content_lines(text)
        .map(|(no, l)| {
            l.parse::<usize>()
                .map_err(|e| Error::parse(no, format!("capacity `{l}`: {e}")))
        })
        .collect::<Result<Vec<_>>>()
        .map(SlotCapacities::new)
}

pub fn format_capacities(caps: &SlotCapacities) -> String {
    caps.as_slice().iter().map(|b| format!("{b}\n")).collect()
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn edge_list_format() {
        let c = Configuration::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(format_configuration(&c), "n=4\n1 2\n3 4\n");
        let back = parse_configuration("n=4\n# comment\n1 2\n\n3 4\n").unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn edge_list_errors() {
        assert!(parse_graph("").is_err());
        assert!(parse_graph("4\n1 2\n").is_err());
        assert!(parse_graph("n=4\n2 1\n").is_err());
        assert!(parse_graph("n=4\n1 5\n").is_err());
        assert!(parse_graph("n=4\n1 2 3\n").is_err());
        assert!(parse_graph("n=4\n1 x\n").is_err());
    }

    #[test]
    fn capacities_format() {
        let caps = parse_capacities("3\n2\n\n2\n").unwrap();
        assert_eq!(caps.as_slice(), &[3, 2, 2]);
        assert_eq!(format_capacities(&caps), "3\n2\n2\n");
        assert!(parse_capacities("1\n-2\n").is_err());
    }

    proptest! {
        #[test]
        fn graph_round_trip(n in 1usize..25, raw in proptest::collection::vec((0usize..25, 0usize..25), 0..60)) {
            let edges: Vec<_> = raw.into_iter().filter(|&(a, b)| a < n && b < n && a != b).collect();
            let g = AcceptanceGraph::from_edges(n, edges).unwrap();
            prop_assert_eq!(parse_graph(&format_graph(&g)).unwrap(), g);
        }
    }
}
