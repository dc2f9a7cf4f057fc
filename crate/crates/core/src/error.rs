use thiserror::Error;

/// Errors raised across the library.
///
/// The CLI maps these onto its exit-code contract: usage errors exit 1,
/// domain and resource errors exit 2, integrity errors exit 3.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An input lies outside the set where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed arguments (zero denominator, empty range, ...).
    #[error("usage error: {0}")]
    Usage(String),
    /// Two p-adic values with different prime or precision were combined.
    #[error("mismatched p-adic parameters: {0}")]
    Mismatch(String),
    /// A configured enumeration cap would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
    /// Two independent computations disagreed. Always a bug.
    #[error("integrity error: {0}")]
    Integrity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn integrity(msg: impl Into<String>) -> Self {
        Error::Integrity(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
