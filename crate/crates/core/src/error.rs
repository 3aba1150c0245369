use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{what} needs n = {n} but the brute-force limit is {limit}; lower n or raise ISOCODE_MAX_N")]
    Capability { what: &'static str, n: usize, limit: usize },

    #[error("graphs are not isomorphic")]
    NotIsomorphic,

    #[error("arithmetic overflow in {0}; use a wider natural type")]
    Overflow(&'static str),

    #[error("malformed description: {0}")]
    Format(String),

    #[error("group size hint {claimed} does not match |Aut| = {actual}")]
    HintMismatch { claimed: String, actual: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
