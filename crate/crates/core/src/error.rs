use std::io;

use thiserror::Error;

pub type Result<T, E = HsError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HsError {
    #[error("probability {0} outside the admissible range")]
    InvalidProbability(f64),

    #[error("instance of {m}x{n} exceeds the memory budget of {budget} bits")]
    DimensionOverflow { m: usize, n: usize, budget: u128 },

    #[error("index {index} out of range (size {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// Row `row` (0-based) cannot be hit by any available column.
    #[error("instance is infeasible: row {row} has no covering column")]
    Infeasible { row: usize },

    #[error("instance too large: n = {n} exceeds the limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("degenerate instance: {0}")]
    Degenerate(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl HsError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        HsError::Domain(msg.into())
    }
}
