use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{ensure_finite_slice, GeomError, Result};

/// A point of the manifold.
///
/// On a chart backend this holds the coordinates; on a Lie backend every
/// left-invariant quantity is point independent and the identity (empty
/// coordinate list) is the only point ever used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn identity() -> Self {
        Self { coords: Vec::new() }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn is_identity(&self) -> bool {
        self.coords.is_empty()
    }

    /// `self + s * dir`, coordinate-wise.
    pub fn displaced(&self, dir: &[f64], s: f64) -> Point {
        let coords = self
            .coords
            .iter()
            .zip(dir)
            .map(|(x, d)| x + s * d)
            .collect();
        Point { coords }
    }

    /// Coordinate `i`, or 0 at the identity of a Lie backend.
    pub fn coord(&self, i: usize) -> f64 {
        self.coords.get(i).copied().unwrap_or(0.0)
    }
}

/// Values a field can take pointwise. Needed for finite differencing.
pub trait FieldValue: Clone + Send + Sync + 'static {
    fn values(&self) -> &[f64];
    /// `a * self + b * other`
    fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self;
}

impl FieldValue for f64 {
    fn values(&self) -> &[f64] {
        std::slice::from_ref(self)
    }
    fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        a * self + b * other
    }
}

impl FieldValue for DVector<f64> {
    fn values(&self) -> &[f64] {
        self.as_slice()
    }
    fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        self * a + other * b
    }
}

impl FieldValue for DMatrix<f64> {
    fn values(&self) -> &[f64] {
        self.as_slice()
    }
    fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        self * a + other * b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Scalar,
    Vector,
    OneForm,
    TwoForm,
    Endomorphism,
    Metric,
}

type Eval<T> = Arc<dyn Fn(&Point) -> Result<T> + Send + Sync>;

/// A smooth field given by a componentwise evaluator in the backend basis.
///
/// Vectors and 1-forms are component vectors, endomorphisms are matrices
/// `M` with `(AX)^k = M[k][j] X^j`, bilinear forms are matrices `B` with
/// `B(X, Y) = X^T B Y`.
#[derive(Clone)]
pub struct Field<T> {
    kind: FieldKind,
    eval: Eval<T>,
}

pub type ScalarField = Field<f64>;
pub type VectorField = Field<DVector<f64>>;
pub type OneFormField = Field<DVector<f64>>;
pub type TensorField = Field<DMatrix<f64>>;

impl<T: FieldValue> Field<T> {
    pub fn new<F>(kind: FieldKind, f: F) -> Self
    where
        F: Fn(&Point) -> Result<T> + Send + Sync + 'static,
    {
        Self {
            kind,
            eval: Arc::new(f),
        }
    }

    /// Infallible closed-form evaluator.
    pub fn from_fn<F>(kind: FieldKind, f: F) -> Self
    where
        F: Fn(&Point) -> T + Send + Sync + 'static,
    {
        Self::new(kind, move |p| Ok(f(p)))
    }

    pub fn constant(kind: FieldKind, value: T) -> Self {
        Self::new(kind, move |_| Ok(value.clone()))
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn eval(&self, p: &Point) -> Result<T> {
        let v = (self.eval)(p)?;
        ensure_finite_slice(v.values(), "field evaluation")?;
        Ok(v)
    }
}

impl<T> fmt::Debug for Field<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field").field("kind", &self.kind).finish()
    }
}

type MetricDerivative = Arc<dyn Fn(&Point, usize) -> Result<DMatrix<f64>> + Send + Sync>;

/// Metric tensor field, optionally with analytic first derivatives
/// `d/dx^a g` along each backend coordinate.
#[derive(Clone)]
pub struct MetricField {
    value: TensorField,
    derivative: Option<MetricDerivative>,
}

impl MetricField {
    pub fn new(value: TensorField) -> Self {
        Self {
            value,
            derivative: None,
        }
    }

    pub fn constant(gram: DMatrix<f64>) -> Self {
        let m = gram.nrows();
        Self {
            value: Field::constant(FieldKind::Metric, gram),
            derivative: Some(Arc::new(move |_, _| Ok(DMatrix::zeros(m, m)))),
        }
    }

    pub fn with_derivative<F>(mut self, d: F) -> Self
    where
        F: Fn(&Point, usize) -> Result<DMatrix<f64>> + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn eval(&self, p: &Point) -> Result<DMatrix<f64>> {
        self.value.eval(p)
    }

    pub fn field(&self) -> &TensorField {
        &self.value
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub(crate) fn analytic_derivative(&self, p: &Point, a: usize) -> Option<Result<DMatrix<f64>>> {
        self.derivative.as_ref().map(|d| {
            let v = d(p, a)?;
            ensure_finite_slice(v.as_slice(), "metric derivative")?;
            Ok(v)
        })
    }
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("analytic_derivative", &self.derivative.is_some())
            .finish()
    }
}

/// Checks that a matrix is symmetric positive definite; returns its Cholesky
/// factor on success.
pub fn require_spd(g: &DMatrix<f64>) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let asym = (g - g.transpose()).amax();
    if asym > 1e-10 * g.amax().max(1.0) {
        return Err(GeomError::Structure(format!(
            "metric not symmetric (asymmetry {asym:e})"
        )));
    }
    g.clone()
        .cholesky()
        .ok_or_else(|| GeomError::Structure("metric not positive definite".into()))
}
