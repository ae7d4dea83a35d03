use thiserror::Error;

/// Errors produced by graph construction, inference and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed arguments: dimension mismatches, out-of-range ids, bad domains.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configured cap (state space, factor count, step budget) was exceeded.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// The requested algorithm does not apply to this graph structure.
    #[error("unsupported structure: {0}")]
    UnsupportedStructure(String),

    /// A text input failed to parse.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn limit(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }

    pub(crate) fn parse(line: usize, column: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
