//! Manifold specification files.
//!
//! A Lie model lists its structure constants `c[i][j][k]` (the `e_k`
//! component of `[e_i, e_j]`), the Gram matrix of the metric on the basis,
//! `phi` as a matrix acting on component columns, the index of the basis
//! vector equal to `xi`, and optionally `eta` (default: the metric dual of
//! `xi`). A chart model refers to a built-in catalog entry with parameters.

use std::collections::BTreeMap;
use std::path::Path;

use acm_core::catalog::{self, ExpectedValues};
use acm_core::geometry::{LieAlgebraSpec, Point, StructureConstants};
use acm_core::structure::AlmostContactStructure;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Lie,
    Chart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogRef {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

/// Per-file overrides of the default tolerances.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axioms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmn: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deform: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    pub backend: BackendKind,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_constants: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<CatalogRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

/// A specification turned into a structure.
#[derive(Debug)]
pub struct Loaded {
    pub spec: ManifoldSpec,
    pub structure: AlmostContactStructure,
    /// Known values for catalog models.
    pub expected: Option<ExpectedValues>,
    pub points: Option<Vec<Point>>,
}

impl ManifoldSpec {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            let (line, column) = (e.line(), e.column());
            let full = e.to_string();
            let suffix = format!(" at line {line} column {column}");
            let msg = full.strip_suffix(&suffix).unwrap_or(&full);
            CliError::Spec(format!("{origin}:{line}:{column}: {msg}"))
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Spec(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn from_catalog(name: &str, params: BTreeMap<String, f64>) -> Result<Self, CliError> {
        let summary = catalog::list()
            .into_iter()
            .find(|s| s.name == name)
            .ok_or_else(|| CliError::Usage(format!("unknown catalog entry '{name}'")))?;
        let backend = match summary.backend {
            "lie" => BackendKind::Lie,
            _ => BackendKind::Chart,
        };
        let model = catalog::build(name, &params)?;
        Ok(Self {
            backend,
            dim: model.structure.dim(),
            structure_constants: None,
            metric: None,
            phi: None,
            xi_index: None,
            eta: None,
            catalog: Some(CatalogRef {
                name: name.to_string(),
                params: model.params,
            }),
            sample_points: None,
            tolerances: None,
        })
    }

    pub fn load(self) -> Result<Loaded, CliError> {
        let points = self
            .sample_points
            .as_ref()
            .map(|pts| {
                pts.iter()
                    .map(|c| {
                        if c.len() != self.dim {
                            return Err(CliError::Spec(format!(
                                "sample point {c:?} has {} coordinates, expected {}",
                                c.len(),
                                self.dim
                            )));
                        }
                        Ok(Point::new(c.clone()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        if let Some(r) = self.catalog.clone() {
            let model = catalog::build(&r.name, &r.params)?;
            let is_lie = model.structure.backend().is_lie();
            if is_lie != (self.backend == BackendKind::Lie) {
                return Err(CliError::Spec(format!(
                    "catalog entry '{}' is not a {:?} model",
                    r.name, self.backend
                )));
            }
            if model.structure.dim() != self.dim {
                return Err(CliError::Spec(format!(
                    "catalog entry '{}' has dimension {}, spec says {}",
                    r.name,
                    model.structure.dim(),
                    self.dim
                )));
            }
            let mut spec = self;
            spec.catalog = Some(CatalogRef {
                name: r.name,
                params: model.params.clone(),
            });
            return Ok(Loaded {
                spec,
                structure: model.structure,
                expected: Some(model.expected),
                points,
            });
        }
        if self.backend == BackendKind::Chart {
            return Err(CliError::Spec(
                "a chart model must name a catalog entry (\"catalog\": {\"name\": ..., \"params\": {...}})"
                    .into(),
            ));
        }
        let structure = self.lie_structure()?;
        Ok(Loaded {
            spec: self,
            structure,
            expected: None,
            points,
        })
    }

    fn lie_structure(&self) -> Result<AlmostContactStructure, CliError> {
        let m = self.dim;
        let missing = |field: &str| CliError::Spec(format!("a Lie model needs \"{field}\""));
        let c = self
            .structure_constants
            .as_ref()
            .ok_or_else(|| missing("structure_constants"))?;
        if c.len() != m {
            return Err(CliError::Spec(format!(
                "structure_constants has {} slices, expected {m}",
                c.len()
            )));
        }
        let constants = StructureConstants::from_nested(c)?;
        let square = |name: &str, rows: &Vec<Vec<f64>>| -> Result<DMatrix<f64>, CliError> {
            if rows.len() != m || rows.iter().any(|r| r.len() != m) {
                return Err(CliError::Spec(format!("{name} must be a {m} x {m} matrix")));
            }
            Ok(DMatrix::from_fn(m, m, |i, j| rows[i][j]))
        };
        let gram = match &self.metric {
            Some(rows) => square("metric", rows)?,
            None => DMatrix::identity(m, m),
        };
        let phi = square("phi", self.phi.as_ref().ok_or_else(|| missing("phi"))?)?;
        let xi_index = self.xi_index.unwrap_or(0);
        if xi_index >= m {
            return Err(CliError::Spec(format!("xi_index {xi_index} out of range")));
        }
        let mut xi = DVector::zeros(m);
        xi[xi_index] = 1.0;
        let eta = match &self.eta {
            Some(e) if e.len() != m => {
                return Err(CliError::Spec(format!("eta must have {m} components")))
            }
            Some(e) => DVector::from_column_slice(e),
            None => &gram * &xi,
        };
        let spec = LieAlgebraSpec::new(constants, gram)?;
        Ok(catalog::lie_structure(spec, phi, xi, eta)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEISENBERG_LIKE: &str = r#"{
        "backend": "lie",
        "dim": 3,
        "structure_constants": [
            [[0, 0, 0], [0, 0, 2], [0, 0, 0]],
            [[0, 0, -2], [0, 0, 0], [0, 0, 0]],
            [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
        ],
        "phi": [[0, 0, 0], [0, 0, -1], [0, 1, 0]],
        "xi_index": 0
    }"#;

    #[test]
    fn lie_spec_loads_with_default_metric_and_eta() {
        let spec = ManifoldSpec::from_json(HEISENBERG_LIKE, "inline").unwrap();
        let loaded = spec.load().unwrap();
        assert_eq!(loaded.structure.dim(), 3);
        assert!(loaded.expected.is_none());
        let p = Point::identity();
        assert_eq!(loaded.structure.eta().eval(&p).unwrap()[0], 1.0);
    }

    #[test]
    fn parse_errors_carry_line_and_column() {
        let e = ManifoldSpec::from_json("{\n  \"backend\": \"lie\",\n  \"dim\": x\n}", "s.json")
            .unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("s.json:3:"), "{msg}");
    }

    #[test]
    fn inconsistent_specs_are_rejected() {
        let bad_dim = HEISENBERG_LIKE.replace("\"dim\": 3", "\"dim\": 5");
        let e = ManifoldSpec::from_json(&bad_dim, "s").unwrap().load().unwrap_err();
        assert!(matches!(e, CliError::Spec(_)), "{e}");
        let not_anti = HEISENBERG_LIKE.replace("[[0, 0, -2], [0, 0, 0]", "[[0, 0, 2], [0, 0, 0]");
        let e = ManifoldSpec::from_json(&not_anti, "s").unwrap().load().unwrap_err();
        assert!(e.to_string().contains("antisymmetric"), "{e}");
        let chart = r#"{"backend": "chart", "dim": 3}"#;
        let e = ManifoldSpec::from_json(chart, "s").unwrap().load().unwrap_err();
        assert!(matches!(e, CliError::Spec(_)));
        let unknown = r#"{"backend": "lie", "dim": 3, "colour": 1}"#;
        assert!(ManifoldSpec::from_json(unknown, "s").is_err());
    }

    #[test]
    fn catalog_reference_fills_in_defaults() {
        let spec = ManifoldSpec::from_catalog("kenmotsu5", BTreeMap::new()).unwrap();
        assert_eq!(spec.backend, BackendKind::Lie);
        assert_eq!(spec.dim, 5);
        assert_eq!(spec.catalog.as_ref().unwrap().params["lambda"], 1.0);
        let loaded = spec.load().unwrap();
        assert!(loaded.expected.is_some());
    }
}
