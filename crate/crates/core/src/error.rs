use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Each variant names a class of failure; the payload says which field or
/// quantity was at fault.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("outside the annulus: {0}")]
    Domain(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("invalid Weierstrass data: {0}")]
    Data(String),
    #[error("data not representable on the annulus: {0}")]
    Representability(String),
    #[error("boundary frame normalization failed: {0}")]
    Normalization(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("not single-valued analytic on the annulus: {0}")]
    Analyticity(String),
    #[error("inconsistent: {0}")]
    Inconsistent(String),
    #[error("flat surface rejected: {0}")]
    Flat(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
