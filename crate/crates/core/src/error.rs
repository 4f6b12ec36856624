use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("invalid collection: {0}")]
    InvalidCollection(String),

    #[error("{operation} requires {expected} bodies")]
    KindMismatch {
        operation: &'static str,
        expected: &'static str,
    },

    #[error("{operation} requires congruent bodies (equal radii)")]
    NotCongruent { operation: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown bound {0:?}")]
    UnknownBound(String),

    #[error("{name} is not defined for d = {d}")]
    DimensionOutOfRange { name: String, d: usize },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("instance too large for the exact oracle: component of {size} bodies exceeds cap {cap}")]
    InstanceTooLarge { size: usize, cap: usize },

    #[error("data asset error: {0}")]
    Asset(String),

    #[error("certificate failure: {0}")]
    Certificate(String),
}

impl Error {
    /// Resource-cap errors are recoverable by switching to an estimator.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit(_) | Error::InstanceTooLarge { .. })
    }
}
