use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("element is outside the domain {domain} (residual {residual:.3e})")]
    Domain { domain: &'static str, residual: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error(transparent)]
    Group(#[from] GroupError),

    #[error("reconstruction failed: {0}")]
    Reconstruction(String),
}

/// Failures raised while validating a multiplication table.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("table must be non-empty and square (row {row} has {len} entries, expected {order})")]
    NotSquare { row: usize, len: usize, order: usize },

    #[error("table entry ({row}, {col}) = {value} is out of range for order {order}")]
    OutOfRange { row: usize, col: usize, value: usize, order: usize },

    #[error("product is not associative on ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),

    #[error("table has no two-sided identity")]
    NoIdentity,

    #[error("element {0} has no inverse")]
    NoInverse(usize),
}
