use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed function-spec document.
    #[error("syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },

    /// Well-formed document denoting an invalid function.
    #[error("invalid function spec at {path}: {msg}")]
    Semantic { path: String, msg: String },

    #[error("exact evaluation unsupported: {0}")]
    UnsupportedExact(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A hypothesis required by the requested computation does not hold.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("resource limit: {needed} items requested, cap is {cap}")]
    ResourceLimit { needed: u128, cap: u64 },

    #[error("orbit of {x} under multiplication by {r} exceeds {cap} steps")]
    OrbitTooLong { x: String, r: u32, cap: usize },

    /// Float-mode result whose combinatorial structure depends on rounding.
    #[error("ambiguous in float mode, rerun in exact mode: {0}")]
    Ambiguous(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
