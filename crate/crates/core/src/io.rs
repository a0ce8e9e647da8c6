//! Line-oriented text formats.
//!
//! All readers skip blank lines and lines starting with `#`, and report the
//! 1-based line number of the first problem.
//!
//! | format | layout |
//! |---|---|
//! | dense matrix | `n`, then `n` rows of `n` decimals |
//! | edge list | `i j w` per line, 0-based, undirected, no duplicates |
//! | labeled points | `n d`, then `n` lines of `d` decimals and a label (`Ck` or `OUT`) |
//! | groups | `entity_id group_id` per line |
//! | descriptors | `id` followed by the descriptor's decimals, one per line |
//! | clusterings | one label vector per line; negative labels are unassigned |
//! | assignment | `id cluster_id` per line, `-1` for unassigned |

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::types::{build_affinity, AffinityMatrix, BuildMode, IndexSet};

/// Reads a whole file as UTF-8.
pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn field<T: FromStr>(line: usize, token: &str, what: &str) -> Result<T> {
    token.parse().map_err(|_| parse_err(line, format!("invalid {what} `{token}`")))
}

fn decimal(line: usize, token: &str) -> Result<f64> {
    let v: f64 = field(line, token, "number")?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(line, format!("non-finite number `{token}`")))
    }
}

/// Parses a dense matrix without validating affinity invariants.
pub fn parse_dense_raw(text: &str) -> Result<DMatrix<f64>> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing size header"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 1 {
        return Err(parse_err(hl, "header must be a single integer `n`"));
    }
    let n: usize = field(hl, tokens[0], "size")?;
    let mut m = DMatrix::zeros(n, n);
    let mut rows = 0;
    for (ln, line) in lines {
        if rows == n {
            return Err(parse_err(ln, format!("more than {n} rows")));
        }
        let values: Vec<&str> = line.split_whitespace().collect();
        if values.len() != n {
            return Err(parse_err(ln, format!("expected {n} values, found {}", values.len())));
        }
        for (j, tok) in values.iter().enumerate() {
            m[(rows, j)] = decimal(ln, tok)?;
        }
        rows += 1;
    }
    if rows != n {
        return Err(parse_err(hl, format!("expected {n} rows, found {rows}")));
    }
    Ok(m)
}

/// Parses and validates a dense affinity matrix.
pub fn parse_dense(text: &str, mode: BuildMode) -> Result<AffinityMatrix> {
    build_affinity(parse_dense_raw(text)?, mode).map(|(a, _)| a)
}

/// Dense matrix text with full round-trip precision.
pub fn format_dense(m: &DMatrix<f64>) -> String {
    let mut out = format!("{}\n", m.nrows());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:?}", m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses an edge list. The vertex count is `n` when given, otherwise one
/// more than the largest id.
pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<AffinityMatrix> {
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (ln, line) in content_lines(text) {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 3 {
            return Err(parse_err(ln, format!("expected `i j w`, found {} fields", t.len())));
        }
        let (i, j): (usize, usize) = (field(ln, t[0], "vertex id")?, field(ln, t[1], "vertex id")?);
        let w = decimal(ln, t[2])?;
        if i == j {
            return Err(parse_err(ln, format!("self-loop on vertex {i}")));
        }
        if w < 0.0 {
            return Err(parse_err(ln, format!("negative weight {w}")));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(parse_err(ln, format!("duplicate edge {i} {j}")));
        }
        edges.push((i, j, w));
    }
    let inferred = edges.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0);
    let n = match n {
        Some(n) if n < inferred => return Err(Error::IndexOutOfRange { index: inferred - 1, len: n }),
        Some(n) => n,
        None => inferred,
    };
    AffinityMatrix::from_edges(n, &edges)
}

/// Label token of the labeled point format.
pub fn format_label(label: Option<usize>) -> String {
    match label {
        Some(k) => format!("C{k}"),
        None => "OUT".to_string(),
    }
}

fn parse_label(line: usize, token: &str) -> Result<Option<usize>> {
    if token == "OUT" {
        return Ok(None);
    }
    token
        .strip_prefix('C')
        .and_then(|k| k.parse().ok())
        .map(Some)
        .ok_or_else(|| parse_err(line, format!("invalid label `{token}` (expected `Ck` or `OUT`)")))
}

/// Points (one per row) with optional ground-truth labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoints {
    pub points: DMatrix<f64>,
    pub labels: Vec<Option<usize>>,
}

/// Parses a labeled point cloud.
pub fn parse_points(text: &str) -> Result<LabeledPoints> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing `n d` header"))?;
    let t: Vec<&str> = header.split_whitespace().collect();
    if t.len() != 2 {
        return Err(parse_err(hl, "header must be `n d`"));
    }
    let (n, d): (usize, usize) = (field(hl, t[0], "point count")?, field(hl, t[1], "dimension")?);
    let mut points = DMatrix::zeros(n, d);
    let mut labels = Vec::with_capacity(n);
    for (ln, line) in lines {
        if labels.len() == n {
            return Err(parse_err(ln, format!("more than {n} points")));
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != d + 1 {
            return Err(parse_err(ln, format!("expected {d} coordinates and a label, found {} fields", t.len())));
        }
        let row = labels.len();
        for (j, tok) in t[..d].iter().enumerate() {
            points[(row, j)] = decimal(ln, tok)?;
        }
        labels.push(parse_label(ln, t[d])?);
    }
    if labels.len() != n {
        return Err(parse_err(hl, format!("expected {n} points, found {}", labels.len())));
    }
    Ok(LabeledPoints { points, labels })
}

/// Labeled point cloud text with full round-trip precision.
pub fn format_points(points: &DMatrix<f64>, labels: &[Option<usize>]) -> String {
    let mut out = format!("{} {}\n", points.nrows(), points.ncols());
    for (i, label) in labels.iter().enumerate() {
        for j in 0..points.ncols() {
            let _ = write!(out, "{:?} ", points[(i, j)]);
        }
        out.push_str(&format_label(*label));
        out.push('\n');
    }
    out
}

/// Parses `entity_id group_id` lines into one set per group id. Every entity
/// `0..n` must appear exactly once and group ids must be `0..I` without gaps.
pub fn parse_groups(text: &str, n: usize) -> Result<Vec<IndexSet>> {
    let mut group_of = vec![None; n];
    for (ln, line) in content_lines(text) {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 2 {
            return Err(parse_err(ln, "expected `entity_id group_id`"));
        }
        let (e, g): (usize, usize) = (field(ln, t[0], "entity id")?, field(ln, t[1], "group id")?);
        if e >= n {
            return Err(parse_err(ln, format!("entity {e} out of range for {n} entities")));
        }
        if group_of[e].replace(g).is_some() {
            return Err(parse_err(ln, format!("entity {e} listed twice")));
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (e, g) in group_of.iter().enumerate() {
        let g = g.ok_or_else(|| Error::invalid("groups", format!("entity {e} has no group")))?;
        if groups.len() <= g {
            groups.resize(g + 1, Vec::new());
        }
        groups[g].push(e);
    }
    if let Some(g) = groups.iter().position(Vec::is_empty) {
        return Err(Error::EmptyGroup { group: g });
    }
    Ok(groups.into_iter().map(IndexSet::new).collect())
}

/// Parses descriptor lines `id v1 v2 ...`; all descriptors share one length.
pub fn parse_descriptors(text: &str) -> Result<Vec<(String, Vec<f64>)>> {
    let mut out: Vec<(String, Vec<f64>)> = Vec::new();
    for (ln, line) in content_lines(text) {
        let mut t = line.split_whitespace();
        let id = t.next().unwrap_or_default().to_string();
        let values = t.map(|tok| decimal(ln, tok)).collect::<Result<Vec<f64>>>()?;
        if values.is_empty() {
            return Err(parse_err(ln, format!("descriptor `{id}` has no values")));
        }
        if let Some((_, first)) = out.first() {
            if first.len() != values.len() {
                return Err(parse_err(ln, format!("expected {} values, found {}", first.len(), values.len())));
            }
        }
        out.push((id, values));
    }
    Ok(out)
}

/// Parses one integer label vector per line; all lines share one length.
pub fn parse_clusterings(text: &str) -> Result<Vec<Vec<i64>>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    for (ln, line) in content_lines(text) {
        let labels = line.split_whitespace().map(|tok| field(ln, tok, "label")).collect::<Result<Vec<i64>>>()?;
        if let Some(first) = out.first() {
            if first.len() != labels.len() {
                return Err(parse_err(ln, format!("ragged line: expected {} labels, found {}", first.len(), labels.len())));
            }
        }
        out.push(labels);
    }
    if out.is_empty() {
        return Err(parse_err(1, "no labelings"));
    }
    Ok(out)
}

/// `id cluster_id` lines, with `-1` for unassigned vertices.
pub fn format_assignment(labels: &[Option<usize>]) -> String {
    let mut out = String::new();
    for (i, l) in labels.iter().enumerate() {
        match l {
            Some(c) => writeln!(out, "{i} {c}"),
            None => writeln!(out, "{i} -1"),
        }
        .expect("writing to a String cannot fail");
    }
    out
}

/// Parses the assignment format back into labels.
pub fn parse_assignment(text: &str) -> Result<Vec<Option<usize>>> {
    let mut out = Vec::new();
    for (ln, line) in content_lines(text) {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 2 {
            return Err(parse_err(ln, "expected `id cluster_id`"));
        }
        let id: usize = field(ln, t[0], "id")?;
        if id != out.len() {
            return Err(parse_err(ln, format!("expected id {}, found {id}", out.len())));
        }
        let c: i64 = field(ln, t[1], "cluster id")?;
        out.push(usize::try_from(c).ok());
    }
    Ok(out)
}

/// What a graph input file contains, detected from its first content line:
/// one field for a dense matrix, two for labeled points, three for an edge
/// list.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphInput {
    Matrix(AffinityMatrix),
    Points(LabeledPoints),
}

pub fn parse_graph_input(text: &str, mode: BuildMode) -> Result<GraphInput> {
    let (ln, first) = content_lines(text).next().ok_or_else(|| parse_err(1, "empty input"))?;
    match first.split_whitespace().count() {
        1 => parse_dense(text, mode).map(GraphInput::Matrix),
        2 => parse_points(text).map(GraphInput::Points),
        3 => parse_edge_list(text, None).map(GraphInput::Matrix),
        k => Err(parse_err(ln, format!("cannot detect format from a first line with {k} fields"))),
    }
}
