use std::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input (length mismatches, bad probabilities, ...).
    InvalidInput(String),
    /// The request exceeds a documented resource cap (e.g. qubit-count limits).
    ResourceLimit(String),
    /// The operation is undefined for these arguments (rank-deficient state,
    /// zero tilt where a nonzero tilt is required, ...).
    Domain(String),
    /// A numeric routine failed to converge.
    Numeric(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::ResourceLimit(msg) => write!(f, "resource limit: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Numeric(msg) => write!(f, "numeric error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
