//! Structured error taxonomy shared by every module.
//!
//! The CLI maps these onto process exit codes: usage errors exit 2,
//! `PrecisionFailure`/`RecognitionFailure` exit 3, `ConsistencyFailure`
//! exits 4.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on user-supplied input was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A certified evaluation could not reach the requested accuracy.
    /// Callers are expected to raise the working precision and retry.
    #[error("precision failure: {0}")]
    PrecisionFailure(String),

    /// A ball did not isolate a unique integer or rational candidate.
    /// Never rounded heuristically; the offending target is named.
    #[error("recognition failure: {0}")]
    RecognitionFailure(String),

    /// Two independently computed quantities that must agree did not.
    #[error("consistency failure: {0}")]
    ConsistencyFailure(String),

    /// A self-check on static configuration (e.g. a Hauptmodul candidate
    /// catalog) found no admissible entry.
    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
