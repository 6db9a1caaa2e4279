//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model, plan, or scenario parameter violates one of its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The environment pushed an oscillator period to zero or below.
    #[error("environment out of range: period multiplier {multiplier} is not positive")]
    EnvironmentOutOfRange { multiplier: f64 },

    /// Two bitstrings that must have equal length do not.
    #[error("bitstring length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// An operation that needs at least one element got none.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A response corpus file could not be parsed.
    #[error("corpus line {line}: {msg}")]
    CorpusParse { line: usize, msg: String },

    /// A scenario configuration could not be parsed.
    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for the CLI: 2 for unreadable input, 3 for
    /// invariant violations, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::CorpusParse { .. } => 2,
            Error::InvalidParameter(_)
            | Error::EnvironmentOutOfRange { .. }
            | Error::LengthMismatch { .. }
            | Error::EmptyInput(_) => 3,
            Error::Io(_) => 1,
        }
    }
}
