use thiserror::Error;

/// Unified error type for the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, row {row} has {cols} columns")]
    NotSquare { rows: usize, row: usize, cols: usize },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("row {row} sums to {sum}, beyond tolerance {tol}")]
    RowSumViolation { row: usize, sum: f64, tol: f64 },

    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("chain is not irreducible (support graph is not strongly connected)")]
    NotIrreducible,

    #[error("chain is not reversible: |mu(u)p(u,v) - mu(v)p(v,u)| = {residual} at ({u}, {v}) exceeds {tol}")]
    NotReversible {
        u: usize,
        v: usize,
        residual: f64,
        tol: f64,
    },

    #[error("stationary mass at state {state} is zero; weighted geometry undefined")]
    ZeroStationaryMass { state: usize },

    #[error("target gap {target} unreachable: {reason}")]
    GapUnreachable { target: f64, reason: String },

    #[error("path has {len} states; at least {min} required")]
    PathTooShort { len: usize, min: usize },

    #[error("state index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("vector is not a probability distribution: {reason}")]
    NotAProbability { reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
