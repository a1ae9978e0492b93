use thiserror::Error;

/// Errors raised by the geometry engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("point {point:?} lies outside the chart domain")]
    Domain { point: Vec<f64> },

    #[error("non-finite value encountered in {op}")]
    Numeric { op: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("degenerate frame: smallest singular value {sigma_min:e}")]
    DegenerateFrame { sigma_min: f64 },

    #[error("structure error: {0}")]
    Structure(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("model inconsistency: {check} residual {residual:e} exceeds {tol:e}")]
    ModelInconsistency {
        check: String,
        residual: f64,
        tol: f64,
    },

    #[error("classification error: alpha spread {spread:e} across sample points")]
    Classification { spread: f64 },

    #[error("extraction error: {0}")]
    Extraction(String),

    #[error("not a (kappa, mu, nu)-space: {0}")]
    NotKmnSpace(String),

    #[error("inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

pub(crate) fn ensure_finite_slice(values: &[f64], op: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(GeomError::Numeric { op: op.to_string() })
    }
}
