//! Levi-Civita connection and curvature.
//!
//! Conventions: `R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`,
//! `R(X,Y,Z,W) = g(R(X,Y)Z, W)` and `K(X,Y) = R(X,Y,Y,X)`, so the round
//! sphere has positive sectional curvature.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::geometry::{require_spd, Backend, Frame, MetricField, Point, TensorField, VectorField};
use crate::structure::AlmostContactStructure;

/// Christoffel symbols `nabla_{e_a} e_b = sum_k gamma(a, b, k) e_k` in the
/// backend basis at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    #[inline]
    pub fn get(&self, a: usize, b: usize, k: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + k]
    }

    /// Matrix of `Y -> nabla_{e_a} Y` acting on constant components:
    /// `[k][b] = gamma(a, b, k)`.
    pub fn matrix(&self, a: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |k, b| self.get(a, b, k))
    }

    /// Matrix of `Y -> nabla_X Y` on constant components.
    pub fn along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let m = self.dim;
        DMatrix::from_fn(m, m, |k, b| (0..m).map(|a| x[a] * self.get(a, b, k)).sum())
    }
}

/// The Levi-Civita connection of a metric on a backend.
#[derive(Debug, Clone)]
pub struct Connection {
    backend: Arc<Backend>,
    metric: MetricField,
}

impl Connection {
    pub fn new(backend: Arc<Backend>, metric: MetricField) -> Self {
        Self { backend, metric }
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    fn metric_derivative(&self, p: &Point, a: usize) -> Result<DMatrix<f64>> {
        match &*self.backend {
            Backend::Lie(_) => {
                let m = self.backend.dim();
                Ok(DMatrix::zeros(m, m))
            }
            Backend::Chart(_) => match self.metric.analytic_derivative(p, a) {
                Some(d) => d,
                None => self.backend.derivative(p, a, |q| self.metric.eval(q)),
            },
        }
    }

    /// Koszul formula in a frame with constant brackets:
    /// `2 g(nabla_a e_b, e_c) = e_a g_bc + e_b g_ac - e_c g_ab
    ///   + g([e_a,e_b],e_c) - g([e_b,e_c],e_a) + g([e_c,e_a],e_b)`.
    pub fn christoffel(&self, p: &Point) -> Result<Christoffel> {
        self.backend.check_point(p)?;
        let m = self.backend.dim();
        let g = self.metric.eval(p)?;
        let chol = require_spd(&g)?;
        let g_inv = chol.inverse();
        let dg: Vec<DMatrix<f64>> = (0..m)
            .map(|a| self.metric_derivative(p, a))
            .collect::<Result<_>>()?;
        let c = self.backend.structure_constants();
        // bracket terms: cg[a][b][x] = g([e_a, e_b], e_x)
        let mut cg = vec![0.0; m * m * m];
        for a in 0..m {
            for b in 0..m {
                for x in 0..m {
                    cg[(a * m + b) * m + x] = (0..m).map(|k| c.get(a, b, k) * g[(k, x)]).sum();
                }
            }
        }
        let cgi = |a: usize, b: usize, x: usize| cg[(a * m + b) * m + x];
        let mut lowered = vec![0.0; m * m * m];
        for a in 0..m {
            for b in 0..m {
                for x in 0..m {
                    lowered[(a * m + b) * m + x] = 0.5
                        * (dg[a][(b, x)] + dg[b][(a, x)] - dg[x][(a, b)] + cgi(a, b, x)
                            - cgi(b, x, a)
                            + cgi(x, a, b));
                }
            }
        }
        let mut data = vec![0.0; m * m * m];
        for a in 0..m {
            for b in 0..m {
                for k in 0..m {
                    data[(a * m + b) * m + k] = (0..m)
                        .map(|x| g_inv[(k, x)] * lowered[(a * m + b) * m + x])
                        .sum();
                }
            }
        }
        crate::error::ensure_finite_slice(&data, "christoffel symbols")?;
        Ok(Christoffel { dim: m, data })
    }

    /// `nabla_X Y` at `p` for a field `Y` and a vector `X` at `p`.
    pub fn covariant_derivative(
        &self,
        x: &DVector<f64>,
        y: &VectorField,
        p: &Point,
    ) -> Result<DVector<f64>> {
        self.covariant_derivative_with_step(x, y, p, self.backend.fd().step)
    }

    pub fn covariant_derivative_with_step(
        &self,
        x: &DVector<f64>,
        y: &VectorField,
        p: &Point,
        step: f64,
    ) -> Result<DVector<f64>> {
        let gamma = self.christoffel(p)?;
        let dy = self
            .backend
            .directional_with_step(p, x.as_slice(), step, |q| y.eval(q))?;
        Ok(dy + gamma.along(x) * y.eval(p)?)
    }

    /// `nabla_{e_a} A` for every backend direction `a`, where `A` is an
    /// endomorphism field. `step` is the difference step for `d_a A`.
    pub fn covariant_derivative_endo(
        &self,
        a_field: &TensorField,
        p: &Point,
        step: f64,
    ) -> Result<Vec<DMatrix<f64>>> {
        let gamma = self.christoffel(p)?;
        let a0 = a_field.eval(p)?;
        let m = self.backend.dim();
        (0..m)
            .map(|a| {
                let da = self
                    .backend
                    .derivative_with_step(p, a, step, |q| a_field.eval(q))?;
                let ga = gamma.matrix(a);
                Ok(da + &ga * &a0 - &a0 * &ga)
            })
            .collect()
    }

    /// Riemann tensor in the backend basis: `R(e_a, e_b) e_c = sum_m r e_m`.
    pub fn riemann_backend(&self, p: &Point) -> Result<Tensor4> {
        let m = self.backend.dim();
        let gamma = self.christoffel(p)?;
        let step = self.backend.fd().second_step;
        let dgamma: Vec<Vec<f64>> = match &*self.backend {
            Backend::Lie(_) => vec![vec![0.0; m * m * m]; m],
            Backend::Chart(_) => (0..m)
                .map(|a| {
                    let plus = p.displaced(&unit_dir(m, a), step);
                    let minus = p.displaced(&unit_dir(m, a), -step);
                    let gp = self.christoffel(&plus)?;
                    let gm = self.christoffel(&minus)?;
                    Ok(gp
                        .data
                        .iter()
                        .zip(&gm.data)
                        .map(|(x, y)| (x - y) / (2.0 * step))
                        .collect())
                })
                .collect::<Result<_>>()?,
        };
        let c = self.backend.structure_constants();
        let dg = |a: usize, b: usize, cc: usize, k: usize| dgamma[a][(b * m + cc) * m + k];
        let mut out = Tensor4::zeros(m);
        for a in 0..m {
            for b in 0..m {
                for cc in 0..m {
                    for mm in 0..m {
                        let mut v = dg(a, b, cc, mm) - dg(b, a, cc, mm);
                        for k in 0..m {
                            v += gamma.get(b, cc, k) * gamma.get(a, k, mm)
                                - gamma.get(a, cc, k) * gamma.get(b, k, mm)
                                - c.get(a, b, k) * gamma.get(k, cc, mm);
                        }
                        out.set(a, b, cc, mm, v);
                    }
                }
            }
        }
        crate::error::ensure_finite_slice(&out.data, "riemann tensor")?;
        Ok(out)
    }

    /// Riemann tensor on a frame: `get(i,j,k,l)` is the `l`-th frame
    /// component of `R(E_i, E_j) E_k`.
    pub fn riemann_in_frame(&self, p: &Point, frame: &Frame) -> Result<Tensor4> {
        let r = self.riemann_backend(p)?;
        Ok(r.change_frame(frame.vectors(), &frame.inverse()?))
    }
}

fn unit_dir(m: usize, a: usize) -> Vec<f64> {
    let mut v = vec![0.0; m];
    v[a] = 1.0;
    v
}

/// A (1,3)-tensor `T(X,Y)Z` stored by components on some basis:
/// `get(i,j,k,l)` is the `l`-th component of `T(e_i, e_j) e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim.pow(4)],
        }
    }

    /// Builds the tensor from `f(i, j, k) = T(e_i, e_j) e_k`.
    pub fn from_fn<F>(dim: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize, usize) -> DVector<f64>,
    {
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let v = f(i, j, k);
                    for l in 0..dim {
                        t.set(i, j, k, l, v[l]);
                    }
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let idx = self.idx(i, j, k, l);
        self.data[idx] = v;
    }

    /// `T(X, Y) Z` for component vectors on the same basis.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let m = self.dim;
        let mut out = DVector::zeros(m);
        for i in 0..m {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..m {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for k in 0..m {
                    let w = xy * z[k];
                    if w == 0.0 {
                        continue;
                    }
                    for l in 0..m {
                        out[l] += w * self.get(i, j, k, l);
                    }
                }
            }
        }
        out
    }

    /// Re-expresses the tensor on new basis vectors given as columns of
    /// `vectors` (old components), with `inverse = vectors^{-1}`.
    pub fn change_frame(&self, vectors: &DMatrix<f64>, inverse: &DMatrix<f64>) -> Tensor4 {
        let m = self.dim;
        let mut cur = self.data.clone();
        // contract the three lower slots one at a time, then the upper slot
        for slot in 0..3 {
            let mut next = vec![0.0; cur.len()];
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        for l in 0..m {
                            let idx = [i, j, k];
                            let mut s = 0.0;
                            for a in 0..m {
                                let mut src = idx;
                                src[slot] = a;
                                s += vectors[(a, idx[slot])]
                                    * cur[((src[0] * m + src[1]) * m + src[2]) * m + l];
                            }
                            next[((i * m + j) * m + k) * m + l] = s;
                        }
                    }
                }
            }
            cur = next;
        }
        let mut out = Tensor4::zeros(m);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let s: f64 = (0..m)
                            .map(|a| inverse[(l, a)] * cur[((i * m + j) * m + k) * m + a])
                            .sum();
                        out.set(i, j, k, l, s);
                    }
                }
            }
        }
        out
    }

    pub fn lin_comb(&self, a: f64, other: &Tensor4, b: f64) -> Tensor4 {
        Tensor4 {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    pub fn scaled(&self, a: f64) -> Tensor4 {
        Tensor4 {
            dim: self.dim,
            data: self.data.iter().map(|x| a * x).collect(),
        }
    }

    pub fn amax(&self) -> f64 {
        self.data.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Max of `|T(X,Y)Z + T(Y,X)Z|` over basis triples.
    pub fn antisymmetry_residual(&self) -> f64 {
        let m = self.dim;
        let mut r: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        r = r.max((self.get(i, j, k, l) + self.get(j, i, k, l)).abs());
                    }
                }
            }
        }
        r
    }

    /// Max of `|T(X,Y,Z,W) + T(X,Y,W,Z)|` on an orthonormal basis.
    pub fn skew_residual(&self) -> f64 {
        let m = self.dim;
        let mut r: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        r = r.max((self.get(i, j, k, l) + self.get(i, j, l, k)).abs());
                    }
                }
            }
        }
        r
    }

    /// Max of `|T(X,Y,Z,W) - T(Z,W,X,Y)|` on an orthonormal basis.
    pub fn pair_symmetry_residual(&self) -> f64 {
        let m = self.dim;
        let mut r: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        r = r.max((self.get(i, j, k, l) - self.get(k, l, i, j)).abs());
                    }
                }
            }
        }
        r
    }

    /// Max component of `T(X,Y)Z + T(Y,Z)X + T(Z,X)Y` over basis triples.
    pub fn bianchi_residual(&self) -> f64 {
        let m = self.dim;
        let mut r: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let s = self.get(i, j, k, l) + self.get(j, k, i, l) + self.get(k, i, j, l);
                        r = r.max(s.abs());
                    }
                }
            }
        }
        r
    }

    /// Ricci operator `Q X = sum_i T(X, E_i) E_i` on an orthonormal basis.
    pub fn ricci_operator(&self) -> DMatrix<f64> {
        let m = self.dim;
        DMatrix::from_fn(m, m, |l, j| (0..m).map(|i| self.get(j, i, i, l)).sum())
    }
}

/// All curvature data at one point, on an orthonormal adapted frame.
#[derive(Debug, Clone)]
pub struct CurvatureSample {
    pub point: Point,
    pub frame: Frame,
    pub riemann: Tensor4,
    pub ricci_q: DMatrix<f64>,
    pub tau: f64,
    /// `K(X, phi X)` for random unit `X` orthogonal to `xi`.
    pub phi_sectional: Vec<f64>,
}

impl CurvatureSample {
    /// Largest deviation from the algebraic symmetries of a curvature tensor.
    pub fn symmetry_residuals(&self) -> SymmetryResiduals {
        SymmetryResiduals {
            antisymmetry: self.riemann.antisymmetry_residual(),
            skew: self.riemann.skew_residual(),
            pair: self.riemann.pair_symmetry_residual(),
            bianchi: self.riemann.bianchi_residual(),
            trace: (self.tau - self.ricci_q.trace()).abs(),
        }
    }

    pub fn phi_sectional_spread(&self) -> f64 {
        spread(&self.phi_sectional)
    }

    /// Riemann tensor rebuilt from `Q` and `tau` with the formula valid in
    /// every 3-dimensional Riemannian manifold.
    pub fn dim3_reconstruction(&self) -> Result<Tensor4> {
        let m = self.riemann.dim();
        if m != 3 {
            return Err(GeomError::Usage(format!(
                "3-dimensional reconstruction called in dimension {m}"
            )));
        }
        Ok(dim3_from_ricci(&self.ricci_q, self.tau))
    }
}

/// `R(X,Y)Z = g(Y,Z)QX - g(X,Z)QY + g(QY,Z)X - g(QX,Z)Y - tau/2 (g(Y,Z)X - g(X,Z)Y)`
/// on an orthonormal basis of a 3-manifold.
pub fn dim3_from_ricci(q: &DMatrix<f64>, tau: f64) -> Tensor4 {
    let m = q.nrows();
    let e = |i: usize| {
        let mut v = DVector::zeros(m);
        v[i] = 1.0;
        v
    };
    let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    Tensor4::from_fn(m, |i, j, k| {
        let qx = q.column(i).into_owned();
        let qy = q.column(j).into_owned();
        qx * d(j, k) - qy * d(i, k) + e(i) * q[(k, j)] - e(j) * q[(k, i)]
            - (e(i) * d(j, k) - e(j) * d(i, k)) * (0.5 * tau)
    })
}

pub(crate) fn spread(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryResiduals {
    pub antisymmetry: f64,
    pub skew: f64,
    pub pair: f64,
    pub bianchi: f64,
    pub trace: f64,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        [self.antisymmetry, self.skew, self.pair, self.bianchi, self.trace]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

impl AlmostContactStructure {
    pub fn connection(&self) -> Connection {
        Connection::new(self.backend_arc(), self.metric().clone())
    }
}

/// Number of random `X` used for the phi-sectional curvature samples.
pub const PHI_SECTIONAL_SAMPLES: usize = 20;

pub fn curvature_sample(s: &AlmostContactStructure, p: &Point, seed: u64) -> Result<CurvatureSample> {
    let frame = s.adapted_frame(p)?;
    curvature_sample_in_frame(s, p, frame, seed)
}

/// As [`curvature_sample`] on a caller-supplied orthonormal frame whose first
/// vector is `xi`.
pub fn curvature_sample_in_frame(
    s: &AlmostContactStructure,
    p: &Point,
    frame: Frame,
    seed: u64,
) -> Result<CurvatureSample> {
    let riemann = s.connection().riemann_in_frame(p, &frame)?;
    let ricci_q = riemann.ricci_operator();
    let tau = ricci_q.trace();
    let tensors = s.frame_tensors(p, &frame)?;
    let m = s.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phi_sectional = Vec::with_capacity(PHI_SECTIONAL_SAMPLES);
    for _ in 0..PHI_SECTIONAL_SAMPLES {
        let mut x = DVector::from_fn(m, |i, _| if i == 0 { 0.0 } else { rng.gen_range(-1.0..1.0) });
        // remove the xi part in case the frame is not exactly adapted
        let xi_part = tensors.eta.dot(&x);
        x -= &tensors.xi * xi_part;
        let norm = x.norm();
        if norm < 1e-8 {
            continue;
        }
        x /= norm;
        let phx = &tensors.phi * &x;
        let r = riemann.apply(&x, &phx, &phx);
        phi_sectional.push(r.dot(&x));
    }
    Ok(CurvatureSample {
        point: p.clone(),
        frame,
        riemann,
        ricci_q,
        tau,
        phi_sectional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use std::collections::BTreeMap;

    fn build(name: &str, kv: &[(&str, f64)]) -> catalog::Model {
        let p: BTreeMap<String, f64> = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        catalog::build(name, &p).unwrap()
    }

    fn r1(m: usize) -> Tensor4 {
        let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        Tensor4::from_fn(m, |i, j, k| {
            let mut v = DVector::zeros(m);
            v[i] += d(j, k);
            v[j] -= d(i, k);
            v
        })
    }

    #[test]
    fn flat_chart_has_zero_connection_and_curvature() {
        let model = build("cosym_flat", &[("n", 2.0)]);
        let p = Point::new(vec![0.1, -0.2, 0.3, 0.0, 0.4]);
        let conn = model.structure.connection();
        let gamma = conn.christoffel(&p).unwrap();
        assert!(gamma.data.iter().all(|x| x.abs() < 1e-12));
        let s = curvature_sample(&model.structure, &p, 1).unwrap();
        assert!(s.riemann.amax() < 1e-10);
        assert_eq!(s.tau, 0.0);
    }

    #[test]
    fn warped_chart_has_constant_curvature_minus_one() {
        let model = build("kenmotsu_warped", &[]);
        let p = Point::new(vec![0.2, 0.1, -0.3]);
        let s = curvature_sample(&model.structure, &p, 1).unwrap();
        let expected = r1(3).scaled(-1.0);
        assert!((s.riemann.lin_comb(1.0, &expected, -1.0)).amax() < 1e-6);
        assert!((s.tau + 6.0).abs() < 1e-6);
        assert!(s.symmetry_residuals().max() < 1e-6);
    }

    #[test]
    fn warped_chart_nabla_xi() {
        // nabla_X xi = X - eta(X) xi
        let model = build("kenmotsu_warped", &[("n", 2.0)]);
        let p = Point::new(vec![0.1, 0.2, -0.1, 0.3, 0.0]);
        let conn = model.structure.connection();
        for a in 0..5 {
            let mut x = DVector::zeros(5);
            x[a] = 1.0;
            let got = conn.covariant_derivative(&x, model.structure.xi(), &p).unwrap();
            let mut want = x.clone();
            want[0] = 0.0;
            assert!((got - want).amax() < 1e-8);
        }
    }

    #[test]
    fn lie_koszul_matches_hand_value() {
        // 2 g(nabla_xi e1, e2) = b - c
        for (b, c) in [(0.0, 2.0), (1.0, 3.0), (1.5, 1.5)] {
            let model = build("cosym3", &[("b", b), ("c", c)]);
            let gamma = model
                .structure
                .connection()
                .christoffel(&Point::identity())
                .unwrap();
            assert!((gamma.get(0, 1, 2) - 0.5 * (b - c)).abs() < 1e-14);
        }
    }

    #[test]
    fn lie_sample_symmetries_and_dim3_reconstruction() {
        for (b, c) in [(0.0, 2.0), (1.0, 3.0), (-1.0, 2.5)] {
            let model = build("cosym3", &[("b", b), ("c", c)]);
            let s = curvature_sample(&model.structure, &Point::identity(), 3).unwrap();
            assert!(s.symmetry_residuals().max() < 1e-12);
            let rebuilt = s.dim3_reconstruction().unwrap();
            assert!(rebuilt.lin_comb(1.0, &s.riemann, -1.0).amax() < 1e-12);
            assert!(s.phi_sectional_spread() < 1e-12);
        }
    }

    #[test]
    fn chart_and_lie_realisations_agree() {
        let lie = build("cosym5", &[("b", 1.0), ("c", 2.0)]);
        let chart = build("cosym_solvable", &[("n", 2.0), ("b", 1.0), ("c", 2.0)]);
        let sl = curvature_sample(&lie.structure, &Point::identity(), 0).unwrap();
        let p = Point::new(vec![0.3, 0.1, -0.2, 0.0, 0.2]);
        let sc = curvature_sample(&chart.structure, &p, 0).unwrap();
        // both frames are xi followed by the left-invariant basis
        let frame_err = (sc.frame.vectors().column(0) - DVector::from_fn(5, |i, _| if i == 0 { 1.0 } else { 0.0 })).amax();
        assert!(frame_err < 1e-12);
        assert!((sl.tau - sc.tau).abs() < 1e-6);
        let ql = sl.ricci_q.symmetric_eigenvalues();
        let qc = sc.ricci_q.symmetric_eigenvalues();
        let mut a: Vec<f64> = ql.iter().cloned().collect();
        let mut b: Vec<f64> = qc.iter().cloned().collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-6, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn outside_chart_is_domain_error() {
        let model = build("cosym_flat", &[]);
        let p = Point::new(vec![2.0, 0.0, 0.0]);
        assert!(matches!(
            curvature_sample(&model.structure, &p, 0),
            Err(GeomError::Domain { .. })
        ));
    }
}
