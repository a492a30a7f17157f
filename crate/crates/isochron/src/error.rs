//! Error types shared across the symbolic layers.

use thiserror::Error;

/// Contract violation by the caller (mismatched parameter sets, bad names, ...).
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("usage error: {msg}")]
pub struct UsageError {
    pub msg: String,
}

impl UsageError {
    pub fn new(msg: String) -> Self {
        UsageError { msg }
    }
}

/// Exact-arithmetic failures.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("division by zero scalar")]
    DivisionByZero,
    #[error("denominator vanishes at {point}")]
    DenominatorVanishes { point: String },
    #[error("negative power of a zero scalar")]
    ZeroToNegativePower,
}
