//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OtlmError {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("row {0} has no stored entries")]
    EmptyRow(usize),

    #[error("column {0} has no stored entries")]
    EmptyCol(usize),

    #[error("dictionary row {0} has support but X w = 0 there; initial weights are zero on every atom covering it")]
    DegenerateRow(usize),

    #[error("effective target is not positive on supported row {0}")]
    NonPositiveEffTarget(usize),

    #[error("numerical overflow at iteration {iter}: {what} left [1e-290, 1e290]; epsilon is likely too small for the cost scale")]
    NumericalOverflow { iter: usize, what: &'static str },

    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error("did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("bisection bracket failure: {0}")]
    BracketFailure(String),
}

pub type Result<T> = std::result::Result<T, OtlmError>;
