//! Reading and writing the standard alist interchange format for sparse
//! parity-check matrices.
//!
//! Layout: `n m` on the first line, the maximum column and row degrees on the
//! second, then the per-column and per-row degree lists, then one line of
//! 1-based check indices per symbol and one line of 1-based symbol indices
//! per check. Zero-padded neighbor lists are accepted on read and ignored.

use crate::error::{Error, Result};
use crate::graph::TannerGraph;

/// Serializes the biadjacency structure of a graph. Check targets are not
/// part of the format; importing sets them to the realized degrees.
pub fn to_alist(graph: &TannerGraph) -> String {
    let n = graph.symbol_count();
    let m = graph.check_count();
    let max_col = (0..n).map(|s| graph.symbol_degree(s)).max().unwrap_or(0);
    let max_row = (0..m).map(|c| graph.check_partial(c)).max().unwrap_or(0);
    let mut out = String::new();
    out.push_str(&format!("{n} {m}\n{max_col} {max_row}\n"));
    // empty neighbor lists are written as a single 0 so every row has content
    let join = |values: &mut dyn Iterator<Item = usize>| {
        let joined = values
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        if joined.is_empty() {
            "0".to_string()
        } else {
            joined
        }
    };
    out.push_str(&join(&mut (0..n).map(|s| graph.symbol_degree(s))));
    out.push('\n');
    out.push_str(&join(&mut (0..m).map(|c| graph.check_partial(c))));
    out.push('\n');
    for s in 0..n {
        out.push_str(&join(&mut graph.symbol_neighbors(s).iter().map(|&c| c + 1)));
        out.push('\n');
    }
    for c in 0..m {
        out.push_str(&join(&mut graph.check_neighbors(c).iter().map(|&s| s + 1)));
        out.push('\n');
    }
    out
}

/// Parses an alist document back into a [`TannerGraph`].
pub fn from_alist(text: &str) -> Result<TannerGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let mut next_line = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::parse(0, format!("unexpected end of input, expected {what}")))
    };

    let (lineno, header) = next_line("size header")?;
    let (n, m) = parse_pair(lineno, header, "n m")?;
    let (lineno, maxes) = next_line("degree header")?;
    let (max_col, max_row) = parse_pair(lineno, maxes, "max degrees")?;

    let (lineno, col_line) = next_line("column degree list")?;
    let col_degs = parse_list(lineno, col_line)?;
    if col_degs.len() != n {
        return Err(Error::parse(
            lineno,
            format!("expected {n} column degrees, got {}", col_degs.len()),
        ));
    }
    let (lineno, row_line) = next_line("row degree list")?;
    let row_degs = parse_list(lineno, row_line)?;
    if row_degs.len() != m {
        return Err(Error::parse(
            lineno,
            format!("expected {m} row degrees, got {}", row_degs.len()),
        ));
    }
    if col_degs.iter().max().copied().unwrap_or(0) != max_col {
        return Err(Error::parse(
            lineno,
            format!("declared max column degree {max_col} does not match the degree list"),
        ));
    }
    if row_degs.iter().max().copied().unwrap_or(0) != max_row {
        return Err(Error::parse(
            lineno,
            format!("declared max row degree {max_row} does not match the degree list"),
        ));
    }

    let mut symbol_lists = Vec::with_capacity(n);
    for (s, &degree) in col_degs.iter().enumerate() {
        let (lineno, line) = next_line("symbol neighbor list")?;
        let ids = parse_neighbors(lineno, line, m)?;
        if ids.len() != degree {
            return Err(Error::parse(
                lineno,
                format!(
                    "symbol {s} declares degree {degree} but lists {} neighbors",
                    ids.len()
                ),
            ));
        }
        symbol_lists.push(ids);
    }
    let mut check_lists = Vec::with_capacity(m);
    for (c, &degree) in row_degs.iter().enumerate() {
        let (lineno, line) = next_line("check neighbor list")?;
        let ids = parse_neighbors(lineno, line, n)?;
        if ids.len() != degree {
            return Err(Error::parse(
                lineno,
                format!(
                    "check {c} declares degree {degree} but lists {} neighbors",
                    ids.len()
                ),
            ));
        }
        check_lists.push(ids);
    }

    let mut graph = TannerGraph::new(n, m, row_degs)?;
    for (s, checks) in symbol_lists.iter().enumerate() {
        for &c in checks {
            graph.add_edge(c, s).map_err(|e| match e {
                Error::Structural(msg) => Error::parse(0, msg),
                other => other,
            })?;
        }
    }
    // the two halves must describe the same matrix
    for (c, symbols) in check_lists.iter().enumerate() {
        let mut expected = symbols.clone();
        expected.sort_unstable();
        if graph.check_neighbors(c) != expected.as_slice() {
            return Err(Error::parse(
                0,
                format!("check {c} neighbor list does not mirror the symbol lists"),
            ));
        }
    }
    Ok(graph)
}

fn parse_pair(lineno: usize, line: &str, what: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((
            a.parse()
                .map_err(|_| Error::parse(lineno, format!("invalid {what}: {a:?}")))?,
            b.parse()
                .map_err(|_| Error::parse(lineno, format!("invalid {what}: {b:?}")))?,
        )),
        _ => Err(Error::parse(lineno, format!("expected two integers for {what}"))),
    }
}

fn parse_list(lineno: usize, line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse()
                .map_err(|_| Error::parse(lineno, format!("invalid integer {tok:?}")))
        })
        .collect()
}

// 1-based ids with zero padding permitted
fn parse_neighbors(lineno: usize, line: &str, bound: usize) -> Result<Vec<usize>> {
    let mut ids = Vec::new();
    for value in parse_list(lineno, line)? {
        if value == 0 {
            continue;
        }
        if value > bound {
            return Err(Error::parse(
                lineno,
                format!("neighbor index {value} exceeds bound {bound}"),
            ));
        }
        ids.push(value - 1);
    }
    Ok(ids)
}
