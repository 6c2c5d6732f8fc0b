//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("probability out of range (0,1]: {0}")]
    ProbabilityOutOfRange(String),

    #[error("group {group} mass {mass} exceeds one")]
    GroupMassExceedsOne { group: usize, mass: String },

    #[error("degenerate sites: {0}")]
    DegenerateSites(String),

    #[error("model tag mismatch: {0}")]
    ModelTagMismatch(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("degenerate projection at level {level}: {detail}")]
    DegenerateProjection { level: usize, detail: String },

    #[error("outcome cap exceeded: {needed} outcomes > cap {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("tukey region is empty")]
    EmptyRegion,

    #[error("no beta-level: {0}")]
    NoLevel(String),

    #[error("probabilities are not uniform: {0}")]
    NonUniform(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
