//! Text formats for graphs: MatrixMarket coordinate files and plain edge lists.

use std::io::{BufRead, Write};

use crate::error::ParseError;
use crate::graph::{EdgeList, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Pattern,
    Real,
    Integer,
}

/// Reads a MatrixMarket coordinate file into 0-based edges.
///
/// Pattern entries get weight 1. For `symmetric` files only the stored
/// triangle is returned; mirroring is left to [`crate::build_graph`].
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<EdgeList, ParseError> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (line_no, header) = match lines.next() {
        Some((no, Ok(l))) => (no, l),
        Some((no, Err(e))) => return Err(header_err(no, e.to_string())),
        None => return Err(header_err(1, "empty input".into())),
    };
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(header_err(line_no, "expected `%%MatrixMarket matrix coordinate <field> <symmetry>`".into()));
    }
    if tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(header_err(line_no, "only `matrix coordinate` is supported".into()));
    }
    let field = match tokens[3].as_str() {
        "pattern" => Field::Pattern,
        "real" => Field::Real,
        "integer" => Field::Integer,
        other => return Err(header_err(line_no, format!("unsupported field `{other}`"))),
    };
    match tokens[4].as_str() {
        "general" | "symmetric" => {}
        other => return Err(header_err(line_no, format!("unsupported symmetry `{other}`"))),
    }

    // Size line, after any comments.
    let mut size: Option<(usize, usize)> = None;
    let mut last_line = line_no;
    for (no, line) in lines.by_ref() {
        last_line = no;
        let line = line.map_err(|e| header_err(no, e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(header_err(no, "size line must be `rows cols entries`".into()));
        }
        let nums: Result<Vec<usize>, _> = parts.iter().map(|p| p.parse::<usize>()).collect();
        let nums = nums.map_err(|e| header_err(no, format!("bad size line: {e}")))?;
        size = Some((nums[0].max(nums[1]), nums[2]));
        break;
    }
    let (n, declared) = size.ok_or_else(|| header_err(last_line + 1, "missing size line".into()))?;

    let mut out = EdgeList::new(n);
    out.entries.reserve(declared);
    for (no, line) in lines {
        last_line = no;
        let line = line.map_err(|e| entry_err(no, e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        if out.entries.len() == declared {
            return Err(entry_err(no, format!("more than the {declared} declared entries")));
        }
        let mut parts = t.split_whitespace();
        let u = parse_index(parts.next(), no, n)?;
        let v = parse_index(parts.next(), no, n)?;
        let w = match field {
            Field::Pattern => 1.0,
            Field::Real | Field::Integer => {
                let tok = parts
                    .next()
                    .ok_or_else(|| entry_err(no, "missing value".into()))?;
                let w: f64 = tok
                    .parse()
                    .map_err(|_| entry_err(no, format!("bad value `{tok}`")))?;
                if !w.is_finite() {
                    return Err(ParseError::NonFiniteWeight {
                        line: no,
                        value: tok.to_string(),
                    });
                }
                w
            }
        };
        out.push(u, v, w);
    }
    if out.entries.len() < declared {
        return Err(ParseError::Truncated {
            line: last_line + 1,
            expected: declared,
            found: out.entries.len(),
        });
    }
    Ok(out)
}

fn parse_index(tok: Option<&str>, line: usize, n: usize) -> Result<usize, ParseError> {
    let tok = tok.ok_or_else(|| entry_err(line, "expected two indices".into()))?;
    let idx: u64 = tok
        .parse()
        .map_err(|_| entry_err(line, format!("bad index `{tok}`")))?;
    if idx == 0 || idx > n as u64 {
        return Err(ParseError::IndexOutOfRange {
            line,
            index: idx,
            max: n,
        });
    }
    Ok(idx as usize - 1)
}

fn header_err(line: usize, reason: String) -> ParseError {
    ParseError::Header { line, reason }
}

fn entry_err(line: usize, reason: String) -> ParseError {
    ParseError::Entry { line, reason }
}

/// Writes `g` as a `real symmetric` MatrixMarket file holding the lower
/// triangle (self-loops included). Reading it back and building with
/// symmetrization reproduces the same CSR arrays.
pub fn write_matrix_market<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    let lower: Vec<(usize, usize, f64)> = g.arcs().filter(|&(u, v, _)| v <= u).collect();
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(out, "{} {} {}", g.n(), g.n(), lower.len())?;
    for (u, v, w) in lower {
        writeln!(out, "{} {} {}", u + 1, v + 1, w)?;
    }
    out.flush()
}

/// Reads a whitespace edge list: one `u v [w]` per line, 0-based ids, `#`
/// comments. The vertex count is one past the largest id, or the value of a
/// `# vertices N` comment when that is larger.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<EdgeList, ParseError> {
    let mut out = EdgeList::default();
    let mut declared = 0usize;
    let mut max_id: Option<usize> = None;
    for (i, line) in reader.lines().enumerate() {
        let no = i + 1;
        let line = line.map_err(|e| entry_err(no, e.to_string()))?;
        let t = line.trim();
        if let Some(comment) = t.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            if words.next() == Some("vertices") {
                let tok = words.next().unwrap_or("");
                declared = tok
                    .parse()
                    .map_err(|_| header_err(no, format!("bad vertex count `{tok}`")))?;
            }
            continue;
        }
        if t.is_empty() {
            continue;
        }
        let mut parts = t.split_whitespace();
        let id = |tok: Option<&str>| -> Result<usize, ParseError> {
            let tok = tok.ok_or_else(|| entry_err(no, "expected `u v [w]`".into()))?;
            tok.parse::<usize>()
                .map_err(|_| entry_err(no, format!("bad vertex id `{tok}`")))
        };
        let u = id(parts.next())?;
        let v = id(parts.next())?;
        let w = match parts.next() {
            None => 1.0,
            Some(tok) => {
                let w: f64 = tok
                    .parse()
                    .map_err(|_| entry_err(no, format!("bad weight `{tok}`")))?;
                if !w.is_finite() {
                    return Err(ParseError::NonFiniteWeight {
                        line: no,
                        value: tok.to_string(),
                    });
                }
                w
            }
        };
        if parts.next().is_some() {
            return Err(entry_err(no, "trailing tokens".into()));
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        out.push(u, v, w);
    }
    out.n = declared.max(max_id.map_or(0, |m| m + 1));
    Ok(out)
}

/// Writes raw edges in the edge-list format, preceded by a vertex-count
/// comment so isolated vertices survive a round trip.
pub fn write_edge_list<W: Write>(edges: &EdgeList, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# vertices {}", edges.n)?;
    for &(u, v, w) in &edges.entries {
        if w == 1.0 {
            writeln!(out, "{u} {v}")?;
        } else {
            writeln!(out, "{u} {v} {w}")?;
        }
    }
    out.flush()
}
