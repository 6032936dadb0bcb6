use thiserror::Error;

/// Failures reported by the library.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition on a word does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Interval arithmetic could not separate a decision boundary.
    #[error("precision exhausted at {bits} bits: {context}")]
    PrecisionExhausted { bits: u32, context: String },
    /// A comparison could not be decided, e.g. the value straddles a threshold.
    #[error("undecidable at current precision: {0}")]
    Undecidable(String),
    /// No base exists for the requested inversion.
    #[error("no root in (1, M+1]: {0}")]
    NoRoot(String),
    /// The operation is defined only for a restricted alphabet.
    #[error("unsupported scope: {0}")]
    Unsupported(String),
    /// Text input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
