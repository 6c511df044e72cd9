use thiserror::Error;

/// Every fallible operation in the crate returns this error.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size limit exceeded: {0}")]
    Size(String),
    #[error("arity mismatch: {left} vs {right} variables")]
    Arity { left: usize, right: usize },
    #[error("invalid transform: {0}")]
    InvalidTransform(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("precondition not met: {0}")]
    Mode(String),
    #[error("degree {found} exceeds {allowed}")]
    Degree { found: usize, allowed: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("value out of domain: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Size(_) => "size",
            Error::Arity { .. } => "arity",
            Error::InvalidTransform(_) => "invalid_transform",
            Error::InvalidInput(_) => "invalid_input",
            Error::Parameter(_) => "parameter",
            Error::Mode(_) => "mode",
            Error::Degree { .. } => "degree",
            Error::Shape(_) => "shape",
            Error::Format { .. } => "format",
            Error::Construction(_) => "construction",
            Error::Domain(_) => "domain",
            Error::Numeric(_) => "numeric",
            Error::Consistency(_) => "consistency",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
