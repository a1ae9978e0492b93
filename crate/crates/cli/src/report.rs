//! The JSON report written by every command.

use acm_core::catalog::{CatalogSummary, ExpectedValues};
use acm_core::decomp::{BasisTag, Certificate, PredictionComparison};
use acm_core::deform::DeformationReport;
use acm_core::kmn::HResiduals;
use acm_core::structure::{StructureClass, ValidationReport};
use acm_core::Check;
use serde::Serialize;

use crate::spec::{ManifoldSpec, ToleranceOverrides};

#[derive(Debug, Clone, Serialize)]
pub struct Engine {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for Engine {
    fn default() -> Self {
        Self {
            name: "acm",
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Tolerances in force for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub axioms: f64,
    pub classify: f64,
    /// Extraction residual and comparisons of `(kappa, mu, nu)`.
    pub kmn: f64,
    pub identity: f64,
    /// Coefficient comparisons of a writing.
    pub fit: f64,
    /// Relative residual below which a writing exists.
    pub fit_residual: f64,
    pub deform: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            axioms: 1e-8,
            classify: 1e-6,
            kmn: 1e-6,
            identity: 1e-5,
            fit: 1e-5,
            fit_residual: 1e-6,
            deform: 1e-5,
        }
    }
}

impl Tolerances {
    /// File overrides first, then the command-line `--tol`, which replaces
    /// the kmn, identity, fit and deformation tolerances.
    pub fn resolve(file: Option<&ToleranceOverrides>, cli: Option<f64>) -> Self {
        let mut t = Self::default();
        if let Some(o) = file {
            let set = |slot: &mut f64, v: Option<f64>| {
                if let Some(v) = v {
                    *slot = v;
                }
            };
            set(&mut t.axioms, o.axioms);
            set(&mut t.classify, o.classify);
            set(&mut t.kmn, o.kmn);
            set(&mut t.identity, o.identity);
            set(&mut t.fit, o.fit);
            set(&mut t.fit_residual, o.fit_residual);
            set(&mut t.deform, o.deform);
        }
        if let Some(v) = cli {
            t.kmn = v;
            t.identity = v;
            t.fit = v;
            t.deform = v;
        }
        t
    }

    pub fn all(&self) -> [f64; 7] {
        [
            self.axioms,
            self.classify,
            self.kmn,
            self.identity,
            self.fit,
            self.fit_residual,
            self.deform,
        ]
    }
}

/// `(kappa, mu, nu)` and `h` at one sample point.
#[derive(Debug, Clone, Serialize)]
pub struct PointKmn {
    pub point: Vec<f64>,
    pub kappa: f64,
    pub mu: f64,
    pub nu: f64,
    /// Residual of the least-squares extraction.
    pub residual: f64,
    pub lambda: f64,
    pub h_norm: f64,
    pub h_vanishes: bool,
    pub split_width: f64,
    pub h_residuals: HResiduals,
    pub scalar_curvature: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Coefficient {
    pub tag: BasisTag,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Prediction {
    pub form: String,
    pub coefficients: Vec<Coefficient>,
    pub comparison: PredictionComparison,
}

#[derive(Debug, Clone, Serialize)]
pub struct Obstruction {
    pub residual: f64,
    pub threshold: f64,
    pub obstructed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub basis: &'static str,
    pub samples: usize,
    pub coefficients: Vec<Coefficient>,
    /// Relative residual `|R - sum f_i R_i| / |R|`.
    pub residual: f64,
    pub abs_residual: f64,
    pub singular_values: Vec<f64>,
    pub nullspace: Vec<Vec<f64>>,
    pub trivial: bool,
    pub certificate: Certificate,
    /// `(f1 - f3, f4 - f6, f7 - f8)` when the writing exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmn_from_writing: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction: Option<Prediction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction_skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<Obstruction>,
}

/// Dimension-3 curvature data, maximised over sample points.
#[derive(Debug, Clone, Serialize)]
pub struct Dim3Block {
    pub scalar_curvature: f64,
    pub phi_sectional: f64,
    pub ricci_reconstruction: f64,
    pub tau_form_reconstruction: f64,
    pub phi_sectional_form_reconstruction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogListing {
    pub entries: Vec<CatalogSummary>,
}

/// A stage that stopped the pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct StageFailure {
    pub stage: String,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub engine: Engine,
    pub command: &'static str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<ManifoldSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectedValues>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<StructureClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmn: Option<Vec<PointKmn>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Decomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim3: Option<Dim3Block>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deformation: Option<DeformationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<CatalogListing>,
    /// Every check run, in pipeline order.
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<StageFailure>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &'static str, seed: u64) -> Self {
        Self {
            engine: Engine::default(),
            command,
            seed,
            spec: None,
            tolerances: None,
            points: Vec::new(),
            expected: None,
            validation: None,
            classification: None,
            kmn: None,
            decomposition: None,
            dim3: None,
            deformation: None,
            catalog: None,
            checks: Vec::new(),
            failure: None,
            passed: true,
        }
    }

    pub fn finish(mut self) -> Self {
        self.passed = self.failure.is_none() && acm_core::check::all_passed(&self.checks);
        self
    }
}
