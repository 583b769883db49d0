use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("unsupported domain for {op}: {reason}")]
    UnsupportedDomain { op: &'static str, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("spectrum incomplete: {0}")]
    IncompleteSpectrum(String),

    #[error("index out of range: k = {k}, available = {available}")]
    OutOfRange { k: usize, available: usize },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("no convergence in {what}: achieved {achieved:e}, wanted {wanted:e}")]
    NoConvergence {
        what: &'static str,
        achieved: f64,
        wanted: f64,
    },

    #[error("mesh generation failed: {0}")]
    Mesh(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
