//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parsing, validation, and metric computation.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameter combination caught at construction time.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Malformed RTTM `SPEAKER` line.
    #[error("rttm parse error at line {line}: {reason}")]
    RttmParse { line: usize, reason: String },

    /// Posterior stream does not start with the `PST1` magic bytes.
    #[error("bad magic: not a PST1 posterior stream")]
    BadMagic,

    /// Posterior stream declares a version this build cannot read.
    #[error("unsupported PST1 version {0} (expected 1)")]
    UnsupportedVersion(u16),

    /// Posterior stream ends before the declared payload.
    #[error("truncated posterior stream: expected at least {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },

    /// A probability row fails validation.
    #[error("invalid probability row {row}: {reason}")]
    InvalidRow { row: usize, reason: String },

    /// An operation referenced a file id with no matching data.
    #[error("unknown file id: {0}")]
    UnknownFile(String),

    /// An operation that requires data received none.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A confidence fell below the lowest bin edge of a uniform scheme.
    #[error("confidence {confidence} below lowest bin edge {edge}")]
    ConfidenceBelowRange { confidence: f64, edge: f64 },

    /// Required inputs are missing on disk.
    #[error("missing inputs: {0}")]
    MissingInputs(String),

    #[error("csv parse error at line {line}: {reason}")]
    CsvParse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
