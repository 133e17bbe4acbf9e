//! Plain-text file formats shared by the library and the CLI.
//!
//! * Matrix file: first line `d`, then d lines of d numbers separated by
//!   single spaces, row-major.
//! * Distribution file: one line of d numbers.
//! * Path file: first line `d`, then whitespace-separated state indices in
//!   visit order (line structure free).
//! * Estimate file: one header line `method=MLE|SCE n=<n> seed=<seed>`,
//!   then the joint matrix in the matrix format. Externally supplied paths
//!   have no seed; their estimates record `seed=0`.
//!
//! Numbers are written with Rust's shortest-round-trip formatting, so a
//! write/read cycle reproduces the original values exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimate::TransitionEstimate;
use crate::experiment::ExperimentConfig;
use crate::markov::{Distribution, RowStochasticMatrix};
use crate::sampling::ChainPath;

fn parse_f64(token: &str, what: &str, file: &Path) -> Result<f64> {
    token.parse::<f64>().map_err(|_| {
        Error::Parse(format!(
            "{}: expected a number for {what}, found {token:?}",
            file.display()
        ))
    })
}

fn parse_usize(token: &str, what: &str, file: &Path) -> Result<usize> {
    token.parse::<usize>().map_err(|_| {
        Error::Parse(format!(
            "{}: expected a nonnegative integer for {what}, found {token:?}",
            file.display()
        ))
    })
}

fn parse_matrix_body<'a, I: Iterator<Item = &'a str>>(
    mut lines: I,
    file: &Path,
) -> Result<RowStochasticMatrix> {
    let head = lines.next().ok_or_else(|| {
        Error::Parse(format!("{}: empty matrix file", file.display()))
    })?;
    let d = parse_usize(head.trim(), "the state count", file)?;
    if d == 0 {
        return Err(Error::Parse(format!(
            "{}: state count must be positive",
            file.display()
        )));
    }
    let mut rows = Vec::with_capacity(d);
    for i in 0..d {
        let line = lines.next().ok_or_else(|| {
            Error::Parse(format!(
                "{}: expected {d} matrix rows, found {i}",
                file.display()
            ))
        })?;
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| parse_f64(tok, "a matrix entry", file))
            .collect::<Result<_>>()?;
        if row.len() != d {
            return Err(Error::Parse(format!(
                "{}: row {} has {} entries, expected {d}",
                file.display(),
                i + 1,
                row.len()
            )));
        }
        rows.push(row);
    }
    if let Some(extra) = lines.find(|l| !l.trim().is_empty()) {
        return Err(Error::Parse(format!(
            "{}: unexpected trailing content {extra:?}",
            file.display()
        )));
    }
    RowStochasticMatrix::new(rows)
}

pub fn read_matrix_file(path: &Path) -> Result<RowStochasticMatrix> {
    let text = fs::read_to_string(path)?;
    parse_matrix_body(text.lines(), path)
}

pub fn write_matrix<W: Write>(mut w: W, p: &RowStochasticMatrix) -> Result<()> {
    let d = p.dim();
    writeln!(w, "{d}")?;
    for u in 0..d {
        let row: Vec<String> = (0..d).map(|v| p.entry(u, v).to_string()).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn write_matrix_file(path: &Path, p: &RowStochasticMatrix) -> Result<()> {
    let mut buf = Vec::new();
    write_matrix(&mut buf, p)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_distribution_file(path: &Path) -> Result<Distribution> {
    let text = fs::read_to_string(path)?;
    let mut nonempty = text.lines().filter(|l| !l.trim().is_empty());
    let line = nonempty.next().ok_or_else(|| {
        Error::Parse(format!("{}: empty distribution file", path.display()))
    })?;
    if nonempty.next().is_some() {
        return Err(Error::Parse(format!(
            "{}: a distribution file holds exactly one line of numbers",
            path.display()
        )));
    }
    let masses: Vec<f64> = line
        .split_whitespace()
        .map(|tok| parse_f64(tok, "a probability mass", path))
        .collect::<Result<_>>()?;
    Distribution::new(masses)
}

pub fn write_distribution<W: Write>(mut w: W, nu: &Distribution) -> Result<()> {
    let row: Vec<String> = (0..nu.dim()).map(|u| nu.mass(u).to_string()).collect();
    writeln!(w, "{}", row.join(" "))?;
    Ok(())
}

pub fn read_path_file(path: &Path) -> Result<ChainPath> {
    let text = fs::read_to_string(path)?;
    let mut tokens = text.split_whitespace();
    let head = tokens.next().ok_or_else(|| {
        Error::Parse(format!("{}: empty path file", path.display()))
    })?;
    let d = parse_usize(head, "the state count", path)?;
    let states: Vec<usize> = tokens
        .map(|tok| parse_usize(tok, "a state index", path))
        .collect::<Result<_>>()?;
    ChainPath::external(d, states)
}

pub fn write_path<W: Write>(mut w: W, path: &ChainPath) -> Result<()> {
    writeln!(w, "{}", path.dim)?;
    let states: Vec<String> = path.states.iter().map(|s| s.to_string()).collect();
    writeln!(w, "{}", states.join(" "))?;
    Ok(())
}

pub fn write_estimate<W: Write>(mut w: W, est: &TransitionEstimate, seed: u64) -> Result<()> {
    writeln!(w, "method={} n={} seed={}", est.method, est.n, seed)?;
    let d = est.joint.nrows();
    writeln!(w, "{d}")?;
    for u in 0..d {
        let row: Vec<String> = (0..d).map(|v| est.joint[(u, v)].to_string()).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn write_estimate_file(path: &Path, est: &TransitionEstimate, seed: u64) -> Result<()> {
    let mut buf = Vec::new();
    write_estimate(&mut buf, est, seed)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    let config: ExperimentConfig = serde_json::from_str(&text)?;
    Ok(config)
}
