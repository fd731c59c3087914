//! Plain-text edge lists.
//!
//! ```text
//! # optional comments
//! n=4          <- optional, must precede every edge line
//! 0 1
//! 1 2
//! ```
//!
//! Blank lines and lines whose first non-blank character is `#` are skipped.
//! LF and CRLF line endings are both accepted.

use super::Graph;
use crate::error::{Error, Result};

/// Upper bound on node indices accepted from text input.
pub const MAX_PARSED_NODES: usize = 1 << 20;

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    parse_edge_list_with_loops(text, false)
}

/// Parses an edge list and, when `self_loops` is set, adds a loop on every
/// node before the degree check.
pub fn parse_edge_list_with_loops(text: &str, self_loops: bool) -> Result<Graph> {
    let mut header: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_index: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("n=") {
            if header.is_some() || !edges.is_empty() {
                return Err(parse_err(
                    line_no,
                    "n= header must appear once, before any edge",
                ));
            }
            let n = parse_index(rest.trim(), line_no)?;
            if n == 0 {
                return Err(parse_err(line_no, "n must be at least 1"));
            }
            header = Some(n);
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(parse_err(line_no, "expected two node indices"));
        };
        if tokens.next().is_some() {
            return Err(parse_err(
                line_no,
                "expected exactly two tokens; weighted edges are not supported",
            ));
        }
        let a = parse_index(a, line_no)?;
        let b = parse_index(b, line_no)?;
        if let Some(n) = header {
            if a >= n || b >= n {
                return Err(parse_err(line_no, &format!("index exceeds declared n={n}")));
            }
        }
        max_index = Some(max_index.unwrap_or(0).max(a).max(b));
        edges.push((a, b));
    }

    let n = match (header, max_index) {
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => return Err(parse_err(0, "edge list is empty")),
    };
    let loops = if self_loops { n } else { 0 };
    Graph::new(n, edges.into_iter().chain((0..loops).map(|i| (i, i))))
}

fn parse_index(token: &str, line: usize) -> Result<usize> {
    if token.starts_with('-') {
        return Err(parse_err(line, &format!("negative index {token:?}")));
    }
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_err(
            line,
            &format!("not a decimal integer: {token:?}"),
        ));
    }
    let value: usize = token
        .parse()
        .map_err(|_| parse_err(line, &format!("integer out of range: {token:?}")))?;
    if value >= MAX_PARSED_NODES {
        return Err(parse_err(
            line,
            &format!("index {value} exceeds limit {MAX_PARSED_NODES}"),
        ));
    }
    Ok(value)
}

fn parse_err(line: usize, message: &str) -> Error {
    Error::FileParse {
        line,
        message: message.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_on_three_nodes() {
        let g = parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn comment_skipped() {
        let g = parse_edge_list("# comment\n0 1").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn malformed_token() {
        assert!(matches!(
            parse_edge_list("0 x"),
            Err(Error::FileParse { line: 1, .. })
        ));
    }

    #[test]
    fn negative_index() {
        assert!(matches!(
            parse_edge_list("0 -1"),
            Err(Error::FileParse { .. })
        ));
    }

    #[test]
    fn weighted_line_rejected() {
        assert!(matches!(
            parse_edge_list("0 1 0.5"),
            Err(Error::FileParse { .. })
        ));
    }

    #[test]
    fn crlf_and_header() {
        let g = parse_edge_list("n=3\r\n0 1\r\n1 2\r\n").unwrap();
        assert_eq!(g.n(), 3);
    }

    #[test]
    fn header_after_edges_rejected() {
        assert!(matches!(
            parse_edge_list("0 1\nn=3"),
            Err(Error::FileParse { line: 2, .. })
        ));
    }

    #[test]
    fn header_with_isolated_node_is_degenerate() {
        assert!(matches!(
            parse_edge_list("n=3\n0 1"),
            Err(Error::DegenerateGraph(_))
        ));
        let g = parse_edge_list_with_loops("n=3\n0 1", true).unwrap();
        assert!(g.has_self_loops());
    }

    #[test]
    fn duplicates_collapse() {
        let g = parse_edge_list("0 1\n1 0\n0 1\n").unwrap();
        assert_eq!(g.edges().len(), 1);
    }

    #[test]
    fn empty_input() {
        assert!(matches!(
            parse_edge_list("# nothing\n\n"),
            Err(Error::FileParse { .. })
        ));
    }

    #[test]
    fn huge_index_rejected() {
        assert!(parse_edge_list("0 99999999999999999999999").is_err());
        assert!(parse_edge_list("n=18446744073709551615\n0 1").is_err());
    }

    #[test]
    fn serialization_round_trip() {
        let g = parse_edge_list_with_loops("0 1\n1 2\n2 0\n", true).unwrap();
        let back = parse_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(g, back);
    }
}
