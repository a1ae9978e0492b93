use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::field::{FieldValue, Point};
use crate::error::{GeomError, Result};

/// Central-difference steps for the chart backend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteDiff {
    /// Step for first derivatives of closed-form fields.
    pub step: f64,
    /// Outer step when differentiating something that is itself a difference
    /// quotient (Christoffel symbols, the h operator).
    pub second_step: f64,
}

impl Default for FiniteDiff {
    fn default() -> Self {
        Self {
            step: 1e-5,
            second_step: 1e-4,
        }
    }
}

/// Structure constants `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    data: Vec<f64>,
}

impl StructureConstants {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn from_nested(c: &[Vec<Vec<f64>>]) -> Result<Self> {
        let dim = c.len();
        let mut out = Self::zeros(dim);
        for (i, ci) in c.iter().enumerate() {
            if ci.len() != dim {
                return Err(GeomError::Usage("structure constants are not cubic".into()));
            }
            for (j, cij) in ci.iter().enumerate() {
                if cij.len() != dim {
                    return Err(GeomError::Usage("structure constants are not cubic".into()));
                }
                for (k, v) in cij.iter().enumerate() {
                    out.set(i, j, k, *v);
                }
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.dim + j) * self.dim + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.data[(i * self.dim + j) * self.dim + k] = v;
    }

    /// Sets `[e_i, e_j] = v e_k` together with its antisymmetric partner.
    pub fn set_bracket(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.set(i, j, k, v);
        self.set(j, i, k, -v);
    }

    /// `[u, v]` for constant-coefficient vectors.
    pub fn bracket(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let m = self.dim;
        let mut out = DVector::zeros(m);
        for a in 0..m {
            if u[a] == 0.0 {
                continue;
            }
            for b in 0..m {
                let w = u[a] * v[b];
                if w == 0.0 {
                    continue;
                }
                for k in 0..m {
                    out[k] += w * self.get(a, b, k);
                }
            }
        }
        out
    }

    /// Matrix of `ad_u`: `(ad_u)[k][b] = sum_a u^a c[a][b][k]`.
    pub fn ad(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let m = self.dim;
        DMatrix::from_fn(m, m, |k, b| (0..m).map(|a| u[a] * self.get(a, b, k)).sum())
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let m = self.dim;
        let mut r: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    r = r.max((self.get(i, j, k) + self.get(j, i, k)).abs());
                }
            }
        }
        r
    }

    /// Max component of `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]`.
    pub fn jacobi_residual(&self) -> f64 {
        let m = self.dim;
        let mut r: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for out in 0..m {
                        let mut s = 0.0;
                        for l in 0..m {
                            s += self.get(i, j, l) * self.get(l, k, out)
                                + self.get(j, k, l) * self.get(l, i, out)
                                + self.get(k, i, l) * self.get(l, j, out);
                        }
                        r = r.max(s.abs());
                    }
                }
            }
        }
        r
    }
}

/// A Lie algebra with a chosen basis; hosts left-invariant models.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraSpec {
    constants: StructureConstants,
    metric: DMatrix<f64>,
}

impl LieAlgebraSpec {
    pub fn new(constants: StructureConstants, metric: DMatrix<f64>) -> Result<Self> {
        let dim = constants.dim();
        if dim < 3 || dim % 2 == 0 {
            return Err(GeomError::Usage(format!(
                "dimension must be odd and >= 3, got {dim}"
            )));
        }
        if metric.nrows() != dim || metric.ncols() != dim {
            return Err(GeomError::Usage("metric Gram matrix has wrong shape".into()));
        }
        let anti = constants.antisymmetry_residual();
        if anti > 1e-12 {
            return Err(GeomError::Usage(format!(
                "structure constants not antisymmetric (residual {anti:e})"
            )));
        }
        let jac = constants.jacobi_residual();
        if jac > 1e-10 {
            return Err(GeomError::Usage(format!(
                "Jacobi identity fails (residual {jac:e})"
            )));
        }
        super::field::require_spd(&metric)?;
        Ok(Self { constants, metric })
    }

    pub fn with_identity_metric(constants: StructureConstants) -> Result<Self> {
        let m = constants.dim();
        Self::new(constants, DMatrix::identity(m, m))
    }

    pub fn dim(&self) -> usize {
        self.constants.dim()
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.constants
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }
}

/// A single coordinate chart on an explicit box.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    lower: Vec<f64>,
    upper: Vec<f64>,
    fd: FiniteDiff,
}

impl Chart {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let dim = lower.len();
        if dim != upper.len() {
            return Err(GeomError::Usage("chart bounds differ in length".into()));
        }
        if dim < 3 || dim % 2 == 0 {
            return Err(GeomError::Usage(format!(
                "dimension must be odd and >= 3, got {dim}"
            )));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(GeomError::Usage("empty chart box".into()));
        }
        Ok(Self {
            lower,
            upper,
            fd: FiniteDiff::default(),
        })
    }

    /// The cube `[-r, r]^dim`.
    pub fn cube(dim: usize, r: f64) -> Result<Self> {
        Self::new(vec![-r; dim], vec![r; dim])
    }

    pub fn with_fd(mut self, fd: FiniteDiff) -> Self {
        self.fd = fd;
        self
    }

    pub fn fd(&self) -> FiniteDiff {
        self.fd
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.coords().len() == self.lower.len()
            && p
                .coords()
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (l, u))| x.is_finite() && *l <= *x && *x <= *u)
    }
}

/// The two interchangeable ways of describing a manifold.
#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    Chart(Chart),
    Lie(LieAlgebraSpec),
}

impl Backend {
    pub fn dim(&self) -> usize {
        match self {
            Backend::Chart(c) => c.lower.len(),
            Backend::Lie(l) => l.dim(),
        }
    }

    pub fn is_lie(&self) -> bool {
        matches!(self, Backend::Lie(_))
    }

    pub fn fd(&self) -> FiniteDiff {
        match self {
            Backend::Chart(c) => c.fd,
            Backend::Lie(_) => FiniteDiff::default(),
        }
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        match self {
            Backend::Chart(c) if !c.contains(p) => Err(GeomError::Domain {
                point: p.coords().to_vec(),
            }),
            Backend::Lie(_) if !p.is_identity() => Err(GeomError::Usage(
                "Lie backend data is left-invariant; evaluate at the identity".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Brackets of the backend basis fields at `p` (zero for coordinate fields).
    pub fn structure_constants(&self) -> StructureConstants {
        match self {
            Backend::Chart(c) => StructureConstants::zeros(c.lower.len()),
            Backend::Lie(l) => l.constants.clone(),
        }
    }

    /// Derivative of `f` along the backend basis field `a` at `p` using the
    /// given central-difference step. On the Lie backend all fields are
    /// left-invariant, so the result is zero.
    pub fn derivative_with_step<T, F>(&self, p: &Point, a: usize, step: f64, f: F) -> Result<T>
    where
        T: FieldValue,
        F: Fn(&Point) -> Result<T>,
    {
        let mut dir = vec![0.0; self.dim()];
        dir[a] = 1.0;
        self.directional_with_step(p, &dir, step, f)
    }

    pub fn derivative<T, F>(&self, p: &Point, a: usize, f: F) -> Result<T>
    where
        T: FieldValue,
        F: Fn(&Point) -> Result<T>,
    {
        self.derivative_with_step(p, a, self.fd().step, f)
    }

    /// Derivative of `f` along the tangent vector `v` (backend components).
    pub fn directional_with_step<T, F>(&self, p: &Point, v: &[f64], step: f64, f: F) -> Result<T>
    where
        T: FieldValue,
        F: Fn(&Point) -> Result<T>,
    {
        self.check_point(p)?;
        match self {
            Backend::Lie(_) => {
                let v0 = f(p)?;
                Ok(v0.lin_comb(0.0, &v0, 0.0))
            }
            Backend::Chart(_) => {
                let plus = p.displaced(v, step);
                let minus = p.displaced(v, -step);
                self.check_point(&plus)?;
                self.check_point(&minus)?;
                let fp = f(&plus)?;
                let fm = f(&minus)?;
                let h = 0.5 / step;
                Ok(fp.lin_comb(h, &fm, -h))
            }
        }
    }

    pub fn directional<T, F>(&self, p: &Point, v: &[f64], f: F) -> Result<T>
    where
        T: FieldValue,
        F: Fn(&Point) -> Result<T>,
    {
        self.directional_with_step(p, v, self.fd().step, f)
    }

    /// All partial derivatives `[d_0 f, ..., d_{m-1} f]` at `p`.
    pub fn gradient_with_step<T, F>(&self, p: &Point, step: f64, f: F) -> Result<Vec<T>>
    where
        T: FieldValue,
        F: Fn(&Point) -> Result<T>,
    {
        (0..self.dim())
            .map(|a| self.derivative_with_step(p, a, step, &f))
            .collect()
    }
}
