//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by construction, analysis, decoding and simulation.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text (distribution spec, alist, LLR file).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// Input violates a documented precondition or invariant.
    #[error("validation error: {0}")]
    Validation(String),
    /// No assignment satisfying the requested constraints exists.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// Internal graph invariant violated; indicates a bug in the caller.
    #[error("structural error: {0}")]
    Structural(String),
    /// The edge-growth loop could not complete.
    #[error("construction failed: {0}")]
    Construction(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
