use thiserror::Error;

/// Errors raised by the projection toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch in {op}: expected {expected}, found {found}")]
    ShapeMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("matrix is not normal: commutator norm {commutator:.3e} exceeds {tolerance:.3e}")]
    NotNormal { commutator: f64, tolerance: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("size guard exceeded: {size} > {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("routes disagree: {0}")]
    Inconsistent(String),

    #[error("decomposition failed: {0}")]
    Decomposition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn shape_err(op: &'static str, expected: impl Into<String>, found: impl Into<String>) -> Error {
    Error::ShapeMismatch {
        op,
        expected: expected.into(),
        found: found.into(),
    }
}
