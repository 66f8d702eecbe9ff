//! Text formats: edge lists, graph6 and trace lines.
//!
//! Edge lists hold one `u v` pair per line; `#` starts a comment and blank
//! lines are ignored. A line with a single vertex declares an isolated
//! vertex. Trace lines are whitespace- or comma-separated vertex ids.

use thiserror::Error;

use crate::graph::{Edge, Graph, GraphError, Vertex};
use crate::walks::{validate_double_trace, DoubleTrace, TraceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("graph6: {0}")]
    Graph6(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_vertex(token: &str, line: usize) -> Result<Vertex, ParseError> {
    token
        .parse::<Vertex>()
        .map_err(|_| syntax(line, format!("invalid vertex id {token:?}")))
}

pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            [v] => vertices.push(parse_vertex(v, line)?),
            [a, b] => {
                let (a, b) = (parse_vertex(a, line)?, parse_vertex(b, line)?);
                if a == b {
                    return Err(syntax(line, format!("self-loop at {a}")));
                }
                let e = Edge::new(a, b);
                if edges.contains(&e) {
                    return Err(syntax(line, format!("duplicate edge {e}")));
                }
                edges.push(e);
            }
            _ => return Err(syntax(line, format!("expected `u v`, found {content:?}"))),
        }
    }
    Ok(Graph::with_vertices(
        vertices,
        edges.iter().map(|e| e.endpoints()),
    )?)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for v in g.vertices().filter(|&v| g.degree(v) == 0) {
        out.push_str(&format!("{v}\n"));
    }
    for e in g.edges() {
        out.push_str(&format!("{} {}\n", e.lo(), e.hi()));
    }
    out
}

/// Parses one graph6 string. Vertices are `0..n`.
pub fn parse_graph6(text: &str) -> Result<Graph, ParseError> {
    let s = text.trim();
    let s = s.strip_prefix(">>graph6<<").unwrap_or(s);
    let bytes = s.as_bytes();
    if bytes.is_empty() {
        return Err(ParseError::Graph6("empty input".into()));
    }
    if let Some(&b) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(ParseError::Graph6(format!("byte {b} out of range")));
    }
    let six = |b: u8| u64::from(b - 63);
    let (n, rest) = if bytes[0] != 126 {
        (six(bytes[0]), &bytes[1..])
    } else if bytes.len() >= 4 && bytes[1] != 126 {
        (
            bytes[1..4].iter().fold(0, |acc, &b| acc << 6 | six(b)),
            &bytes[4..],
        )
    } else if bytes.len() >= 8 && bytes[1] == 126 {
        (
            bytes[2..8].iter().fold(0, |acc, &b| acc << 6 | six(b)),
            &bytes[8..],
        )
    } else {
        return Err(ParseError::Graph6("truncated vertex count".into()));
    };
    let n = usize::try_from(n).map_err(|_| ParseError::Graph6("vertex count too large".into()))?;
    if n > Vertex::MAX as usize {
        return Err(ParseError::Graph6("vertex count too large".into()));
    }
    let bits = n * n.saturating_sub(1) / 2;
    let needed = bits.div_ceil(6);
    if rest.len() != needed {
        return Err(ParseError::Graph6(format!(
            "expected {needed} data bytes for {n} vertices, found {}",
            rest.len()
        )));
    }
    let bit = |k: usize| (six(rest[k / 6]) >> (5 - k % 6)) & 1 == 1;
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                edges.push((i as Vertex, j as Vertex));
            }
            k += 1;
        }
    }
    Ok(Graph::with_vertices(0..n as Vertex, edges)?)
}

/// Encodes `g` as graph6 after mapping its vertices, in increasing order,
/// to `0..n`.
pub fn write_graph6(g: &Graph) -> String {
    let ids: Vec<Vertex> = g.vertices().collect();
    let n = ids.len();
    let mut out = Vec::new();
    let push6 = |out: &mut Vec<u8>, x: u64| out.push(63 + (x & 63) as u8);
    if n <= 62 {
        push6(&mut out, n as u64);
    } else if n <= 258_047 {
        out.push(126);
        for shift in [12, 6, 0] {
            push6(&mut out, (n as u64) >> shift);
        }
    } else {
        out.extend([126, 126]);
        for shift in [30, 24, 18, 12, 6, 0] {
            push6(&mut out, (n as u64) >> shift);
        }
    }
    let mut bits = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in 1..n {
        for i in 0..j {
            bits.push(g.has_edge(ids[i], ids[j]));
        }
    }
    for chunk in bits.chunks(6) {
        let mut x = 0u64;
        for (k, &b) in chunk.iter().enumerate() {
            if b {
                x |= 1 << (5 - k);
            }
        }
        push6(&mut out, x);
    }
    String::from_utf8(out).expect("printable ascii")
}

pub fn parse_trace_line(text: &str) -> Result<Vec<Vertex>, ParseError> {
    let content = text.split('#').next().unwrap_or("");
    content
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| parse_vertex(t, 1))
        .collect()
}

/// Parses a trace line and validates it against `g`.
pub fn parse_trace(g: &Graph, text: &str) -> Result<DoubleTrace, ParseError> {
    let seq = parse_trace_line(text)?;
    Ok(validate_double_trace(g, &seq)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete, cube, petersen, star};

    #[test]
    fn edge_list_round_trip() {
        let g = parse_edge_list("# triangle\n0 1\n1 2 # closing\n\n2 0\n").unwrap();
        assert_eq!(g, complete(3));
        assert_eq!(parse_edge_list(&write_edge_list(&cube())).unwrap(), cube());
    }

    #[test]
    fn edge_list_errors_name_the_line() {
        let err = parse_edge_list("0 1\n1 x\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));
        assert!(matches!(
            parse_edge_list("0 1\n1 0\n"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("3 3\n"),
            Err(ParseError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("0 1 2\n"),
            Err(ParseError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn graph6_known_strings() {
        assert_eq!(write_graph6(&complete(3)), "Bw");
        assert_eq!(write_graph6(&complete(4)), "C~");
        assert_eq!(write_graph6(&complete(5)), "D~{");
        assert_eq!(write_graph6(&petersen()), "IheA@GUAo");
        assert_eq!(parse_graph6("C~").unwrap(), complete(4));
        for g in [complete(6), cube(), petersen(), star(7)] {
            assert_eq!(parse_graph6(&write_graph6(&g)).unwrap(), g);
        }
        assert!(parse_graph6("C").is_err());
        assert!(parse_graph6("C~~").is_err());
    }

    #[test]
    fn trace_lines() {
        let k3 = complete(3);
        let w = parse_trace(&k3, "0, 1, 2, 0, 2, 1").unwrap();
        assert_eq!(w.len(), 6);
        assert!(parse_trace(&k3, "0 1 2").is_err());
        assert!(parse_trace_line("0 a").is_err());
    }
}
