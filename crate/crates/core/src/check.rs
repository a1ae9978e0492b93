use serde::Serialize;

/// One named numerical check with its tolerance and outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tol,
            passed: residual.is_finite() && residual <= tol,
        }
    }

    /// A check that passes when the residual exceeds `threshold`.
    pub fn above(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tol: threshold,
            passed: residual.is_finite() && residual > threshold,
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
