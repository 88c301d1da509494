use thiserror::Error;

use crate::ring::ModelCase;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("nilpotency mismatch: {left} vs {right}")]
    NilpotencyMismatch { left: usize, right: usize },

    #[error("element is not a unit: {0}")]
    NonUnit(String),

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),

    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("{case} does not support {what}")]
    UnsupportedCase { case: ModelCase, what: String },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("path passes within {distance:e} of the singular point {point} (minimum {minimum:e})")]
    PathTooClose {
        point: String,
        distance: f64,
        minimum: f64,
    },

    #[error("endpoint system is ill-conditioned (condition ~ {condition:e}); {suggestion}")]
    IllConditioned { condition: f64, suggestion: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short machine-readable tag used in structured error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NilpotencyMismatch { .. } => "nilpotency_mismatch",
            Error::NonUnit(_) => "non_unit",
            Error::ParseRational(_) => "parse_rational",
            Error::Structural(_) => "structural",
            Error::UnsupportedCase { .. } => "unsupported_case",
            Error::InvariantViolation(_) => "invariant_violation",
            Error::PathTooClose { .. } => "path_too_close",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::InvalidInput(_) => "invalid_input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
