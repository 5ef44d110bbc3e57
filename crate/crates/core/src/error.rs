use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested size exceeds a hard limit (e.g. enumeration length).
    #[error("size error: {what} = {got} exceeds limit {limit}")]
    Size { what: &'static str, got: u64, limit: u64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A simulator detected a state that violates one of its invariants.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("output error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
