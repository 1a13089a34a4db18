//! Text formats: edge lists, score vectors, and GMT gene-set files.
//!
//! All parsers take the file contents as a string and report malformed
//! lines by 1-based line number. Edge lists and score files treat `#` as
//! a comment-to-end-of-line marker and skip blank lines; GMT files skip
//! whole lines starting with `#` (descriptions may contain the character).
//!
//! Edge list: lines `u v` of 0-based node ids, plus an optional header
//! line `n <count>` declaring the node count; without one the count is
//! inferred as the largest id plus one. Duplicate and reversed edges are
//! tolerated and deduplicated.
//!
//! Scores: either one real per line (node order), or `node_id value`
//! pairs covering every node exactly once. Named scores (`name value`,
//! e.g. gene symbols) are a separate format used with gene sets.

use std::collections::HashSet;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::graph::Graph;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Data lines with comments stripped, paired with 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared: Option<usize> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (lineno, line) in data_lines(text) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens[0] == "n" {
            if tokens.len() != 2 {
                return Err(parse_err(lineno, "node-count header must be 'n <count>'"));
            }
            if declared.is_some() {
                return Err(parse_err(lineno, "duplicate node-count header"));
            }
            let n: usize = tokens[1]
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad node count '{}'", tokens[1])))?;
            declared = Some(n);
            continue;
        }
        if tokens.len() != 2 {
            return Err(parse_err(
                lineno,
                format!("expected 'u v', got {} tokens", tokens.len()),
            ));
        }
        let mut pair = [0usize; 2];
        for (slot, tok) in pair.iter_mut().zip(&tokens) {
            *slot = tok
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad node id '{tok}'")))?;
        }
        if let Some(n) = declared {
            if pair[0] >= n || pair[1] >= n {
                return Err(parse_err(
                    lineno,
                    format!("edge ({}, {}) outside declared n = {n}", pair[0], pair[1]),
                ));
            }
        }
        edges.push((pair[0], pair[1]));
    }
    let n = match declared {
        Some(n) => n,
        None => {
            let max = edges
                .iter()
                .map(|&(u, v)| u.max(v))
                .max()
                .ok_or_else(|| {
                    Error::InvalidGraph(
                        "edge list has no edges and no 'n <count>' header".into(),
                    )
                })?;
            max + 1
        }
    };
    Graph::build(n, &edges)
}

fn parse_value(lineno: usize, tok: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(lineno, format!("bad score '{tok}'")))?;
    if !v.is_finite() {
        return Err(parse_err(lineno, format!("non-finite score '{tok}'")));
    }
    Ok(v)
}

/// Node-indexed scores, either one value per line or `node_id value`
/// pairs; the pair format must cover ids `0..n` exactly once.
pub fn parse_scores(text: &str) -> Result<DVector<f64>> {
    let mut plain: Vec<f64> = Vec::new();
    let mut paired: Vec<(usize, f64, usize)> = Vec::new();
    for (lineno, line) in data_lines(text) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.len() {
            1 if paired.is_empty() => plain.push(parse_value(lineno, tokens[0])?),
            2 if plain.is_empty() => {
                let id: usize = tokens[0]
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad node id '{}'", tokens[0])))?;
                paired.push((id, parse_value(lineno, tokens[1])?, lineno));
            }
            1 | 2 => {
                return Err(parse_err(
                    lineno,
                    "mixed score formats: use either 'value' or 'node_id value' lines",
                ))
            }
            k => return Err(parse_err(lineno, format!("expected 1 or 2 tokens, got {k}"))),
        }
    }
    if !plain.is_empty() {
        return Ok(DVector::from_vec(plain));
    }
    if paired.is_empty() {
        return Err(Error::InvalidParameter("scores file is empty".into()));
    }
    let n = paired.iter().map(|&(id, _, _)| id).max().unwrap() + 1;
    let mut values = vec![None; n];
    for (id, v, lineno) in paired {
        if values[id].replace(v).is_some() {
            return Err(parse_err(lineno, format!("duplicate score for node {id}")));
        }
    }
    let mut out = Vec::with_capacity(n);
    for (id, v) in values.into_iter().enumerate() {
        out.push(v.ok_or_else(|| {
            Error::InvalidParameter(format!("scores cover ids up to {}, but node {id} is missing", n - 1))
        })?);
    }
    Ok(DVector::from_vec(out))
}

/// `name value` scores keyed by string ids (e.g. gene symbols), order
/// preserved; duplicate names are an error.
pub fn parse_named_scores(text: &str) -> Result<Vec<(String, f64)>> {
    let mut out: Vec<(String, f64)> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (lineno, line) in data_lines(text) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(parse_err(
                lineno,
                format!("expected 'name value', got {} tokens", tokens.len()),
            ));
        }
        if !seen.insert(tokens[0].to_string()) {
            return Err(parse_err(lineno, format!("duplicate score for '{}'", tokens[0])));
        }
        out.push((tokens[0].to_string(), parse_value(lineno, tokens[1])?));
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter("scores file is empty".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneSet {
    pub name: String,
    pub description: String,
    /// Unique, in file order.
    pub members: Vec<String>,
}

/// GMT format: one set per line, tab-separated `name`, `description`,
/// then members. Repeated members within a line are deduplicated.
pub fn parse_gene_sets(text: &str) -> Result<Vec<GeneSet>> {
    let mut sets = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let mut fields = raw.split('\t');
        let name = fields.next().unwrap_or("").trim().to_string();
        if name.is_empty() {
            return Err(parse_err(lineno, "gene set needs a nonempty name"));
        }
        let description = fields
            .next()
            .ok_or_else(|| parse_err(lineno, "gene set needs a description field"))?
            .trim()
            .to_string();
        let mut members = Vec::new();
        let mut seen = HashSet::new();
        for m in fields {
            let m = m.trim();
            if !m.is_empty() && seen.insert(m.to_string()) {
                members.push(m.to_string());
            }
        }
        sets.push(GeneSet {
            name,
            description,
            members,
        });
    }
    Ok(sets)
}

/// Drop members that have no score, reporting them; the surviving members
/// keep their order, which downstream code uses as the node order.
pub fn reduce_to_universe(set: &GeneSet, have: &HashSet<&str>) -> (GeneSet, Vec<String>) {
    let mut kept = Vec::new();
    let mut missing = Vec::new();
    for m in &set.members {
        if have.contains(m.as_str()) {
            kept.push(m.clone());
        } else {
            missing.push(m.clone());
        }
    }
    (
        GeneSet {
            name: set.name.clone(),
            description: set.description.clone(),
            members: kept,
        },
        missing,
    )
}
