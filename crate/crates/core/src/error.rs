use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library. The CLI maps [`Error::Budget`] to its
/// resource exit code and everything else to the domain-error exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("element {element} out of range for a structure of size {size}")]
    OutOfRange { element: usize, size: usize },

    #[error("symbol `{symbol}` has arity {expected}, got {got} arguments")]
    ArityMismatch { symbol: String, expected: usize, got: usize },

    #[error("signature mismatch")]
    SignatureMismatch,

    #[error("tuple lengths differ ({0} vs {1})")]
    TupleLength(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown bf-type {0}")]
    UnknownType(String),

    #[error("malformed bf-structure: {0}")]
    Malformed(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("formula is not Π₂: {0}")]
    NotPi2(String),

    #[error("node budget of {0} comparisons exhausted")]
    Budget(u64),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn syntax(line: usize, msg: impl Into<String>) -> Self {
        Error::Syntax { line, msg: msg.into() }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
