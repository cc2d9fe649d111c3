//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by any stage of the modeling pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("artifact error: {0}")]
    Artifact(#[from] serde_json::Error),

    #[error("{path}: {msg}")]
    CsvStructure { path: String, msg: String },

    #[error("{path}: data row {row}, column `{column}`: `{value}` is not a finite number")]
    CsvCell {
        path: String,
        row: usize,
        column: String,
        value: String,
    },

    #[error("k = {k} out of range [1, {max}]")]
    KOutOfRange { k: usize, max: usize },

    #[error("empty candidate grid for k selection")]
    EmptyGrid,

    #[error("splits overlap: {context}")]
    OverlappingSplits { context: String },

    #[error("role `{role}` has {got} rows, needs at least {needed}")]
    InsufficientRows {
        role: String,
        got: usize,
        needed: usize,
    },

    #[error("feature dimension {got} does not match model dimension {expected}")]
    DimensionMismatch { got: usize, expected: usize },

    #[error(
        "calibration set too small: quantile rank {rank} exceeds the {available} usable rows"
    )]
    InsufficientCalibration { rank: usize, available: usize },

    #[error("empirical interval requested but the model carries no calibration set")]
    Uncalibrated,

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Process exit code for the CLI: 3 for i/o failures, 4 for violated
    /// preconditions and malformed inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 3,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
