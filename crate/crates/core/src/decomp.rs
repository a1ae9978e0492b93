//! The tensor basis `R1 .. R8` (with `R5 = R5,1 - R5,2`), least-squares
//! writing of the curvature tensor, uniqueness certificates, closed-form
//! coefficient predictions and obstruction tests.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::check::Check;
use crate::curvature::Tensor4;
use crate::error::{GeomError, Result};
use crate::kmn::PointAnalysis;
use crate::lstsq;
use crate::structure::{FrameTensors, StructureTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BasisTag {
    R1,
    R2,
    R3,
    R4,
    R5,
    #[serde(rename = "R5,1")]
    R51,
    #[serde(rename = "R5,2")]
    R52,
    R6,
    R7,
    R8,
}

impl BasisTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisTag::R1 => "R1",
            BasisTag::R2 => "R2",
            BasisTag::R3 => "R3",
            BasisTag::R4 => "R4",
            BasisTag::R5 => "R5",
            BasisTag::R51 => "R5,1",
            BasisTag::R52 => "R5,2",
            BasisTag::R6 => "R6",
            BasisTag::R7 => "R7",
            BasisTag::R8 => "R8",
        }
    }

    pub const ALL: [BasisTag; 10] = [
        BasisTag::R1,
        BasisTag::R2,
        BasisTag::R3,
        BasisTag::R4,
        BasisTag::R5,
        BasisTag::R51,
        BasisTag::R52,
        BasisTag::R6,
        BasisTag::R7,
        BasisTag::R8,
    ];
}

/// `(f1, f2, f3, f4, f5,1, f5,2, f6, f7, f8)`
pub const DIVIDED: [BasisTag; 9] = [
    BasisTag::R1,
    BasisTag::R2,
    BasisTag::R3,
    BasisTag::R4,
    BasisTag::R51,
    BasisTag::R52,
    BasisTag::R6,
    BasisTag::R7,
    BasisTag::R8,
];

/// `(f1, ..., f8)`
pub const UNDIVIDED: [BasisTag; 8] = [
    BasisTag::R1,
    BasisTag::R2,
    BasisTag::R3,
    BasisTag::R4,
    BasisTag::R5,
    BasisTag::R6,
    BasisTag::R7,
    BasisTag::R8,
];

/// Coefficients attached to an ordered list of basis tensors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficients {
    pub tags: Vec<BasisTag>,
    pub values: Vec<f64>,
}

impl Coefficients {
    pub fn new(tags: Vec<BasisTag>, values: Vec<f64>) -> Self {
        assert_eq!(tags.len(), values.len());
        Self { tags, values }
    }

    pub fn divided(values: [f64; 9]) -> Self {
        Self::new(DIVIDED.to_vec(), values.to_vec())
    }

    pub fn undivided(values: [f64; 8]) -> Self {
        Self::new(UNDIVIDED.to_vec(), values.to_vec())
    }

    pub fn zeros(tags: &[BasisTag]) -> Self {
        Self::new(tags.to_vec(), vec![0.0; tags.len()])
    }

    pub fn get(&self, tag: BasisTag) -> Option<f64> {
        self.tags.iter().position(|t| *t == tag).map(|i| self.values[i])
    }

    /// Coefficient of `tag`, or 0 when the tag is absent.
    pub fn value(&self, tag: BasisTag) -> f64 {
        self.get(tag).unwrap_or(0.0)
    }

    fn set(&mut self, tag: BasisTag, v: f64) {
        let i = self
            .tags
            .iter()
            .position(|t| *t == tag)
            .expect("tag present in basis");
        self.values[i] = v;
    }

    /// `(f1 - f3, f4 - f6, f7 - f8)`
    pub fn kmn(&self) -> [f64; 3] {
        use BasisTag::*;
        [
            self.value(R1) - self.value(R3),
            self.value(R4) - self.value(R6),
            self.value(R7) - self.value(R8),
        ]
    }

    pub fn as_vector(&self) -> DVector<f64> {
        DVector::from_vec(self.values.clone())
    }
}

/// The ten basis tensors on an orthonormal frame at one point.
#[derive(Debug, Clone)]
pub struct BasisTensorSet {
    tensors: Vec<(BasisTag, Tensor4)>,
}

impl BasisTensorSet {
    /// `t` must be given on an orthonormal frame; `h` on the same frame.
    pub fn new(t: &FrameTensors, h: &DMatrix<f64>) -> Self {
        let tensors = BasisTag::ALL
            .iter()
            .map(|&tag| (tag, basis_tensor(tag, t, h)))
            .collect();
        Self { tensors }
    }

    pub fn get(&self, tag: BasisTag) -> &Tensor4 {
        &self
            .tensors
            .iter()
            .find(|(t, _)| *t == tag)
            .expect("all tags evaluated")
            .1
    }

    /// `sum_i f_i R_i`
    pub fn combine(&self, coeffs: &Coefficients) -> Tensor4 {
        let m = self.tensors[0].1.dim();
        coeffs
            .tags
            .iter()
            .zip(&coeffs.values)
            .fold(Tensor4::zeros(m), |acc, (tag, f)| {
                acc.lin_comb(1.0, self.get(*tag), *f)
            })
    }
}

/// Values of every basis tensor on `(X, Y, Z)`, in the order of [`BasisTag::ALL`].
pub fn eval_basis(
    t: &FrameTensors,
    h: &DMatrix<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> Vec<DVector<f64>> {
    BasisTag::ALL
        .iter()
        .map(|&tag| basis_value(tag, t, h, x, y, z))
        .collect()
}

fn basis_value(
    tag: BasisTag,
    t: &FrameTensors,
    h: &DMatrix<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> DVector<f64> {
    let g = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * &t.gram * b)[(0, 0)];
    let phi = &t.phi;
    let xi = &t.xi;
    let eta = |a: &DVector<f64>| t.eta.dot(a);
    let phh = phi * h;
    match tag {
        BasisTag::R1 => x * g(y, z) - y * g(x, z),
        BasisTag::R2 => {
            let (px, py, pz) = (phi * x, phi * y, phi * z);
            &py * g(x, &pz) - &px * g(y, &pz) + pz * (2.0 * g(x, &py))
        }
        BasisTag::R3 => {
            y * (eta(x) * eta(z)) - x * (eta(y) * eta(z)) + xi * (g(x, z) * eta(y))
                - xi * (g(y, z) * eta(x))
        }
        BasisTag::R4 => {
            let (hx, hy) = (h * x, h * y);
            &hx * g(y, z) - &hy * g(x, z) + x * g(&hy, z) - y * g(&hx, z)
        }
        BasisTag::R5 => {
            basis_value(BasisTag::R51, t, h, x, y, z) - basis_value(BasisTag::R52, t, h, x, y, z)
        }
        BasisTag::R51 => {
            let (hx, hy) = (h * x, h * y);
            &hx * g(&hy, z) - &hy * g(&hx, z)
        }
        BasisTag::R52 => {
            let (px, py) = (&phh * x, &phh * y);
            &px * g(&py, z) - &py * g(&px, z)
        }
        BasisTag::R6 => {
            let (hx, hy) = (h * x, h * y);
            &hy * (eta(x) * eta(z)) - &hx * (eta(y) * eta(z)) + xi * (g(&hx, z) * eta(y))
                - xi * (g(&hy, z) * eta(x))
        }
        BasisTag::R7 => {
            let (px, py) = (&phh * x, &phh * y);
            &px * g(y, z) - &py * g(x, z) + x * g(&py, z) - y * g(&px, z)
        }
        BasisTag::R8 => {
            let (px, py) = (&phh * x, &phh * y);
            &py * (eta(x) * eta(z)) - &px * (eta(y) * eta(z)) + xi * (g(&px, z) * eta(y))
                - xi * (g(&py, z) * eta(x))
        }
    }
}

fn basis_tensor(tag: BasisTag, t: &FrameTensors, h: &DMatrix<f64>) -> Tensor4 {
    let m = h.nrows();
    let e = |i: usize| {
        let mut v = DVector::zeros(m);
        v[i] = 1.0;
        v
    };
    Tensor4::from_fn(m, |i, j, k| basis_value(tag, t, h, &e(i), &e(j), &e(k)))
}

/// Curvature and basis tensors at one point.
#[derive(Debug, Clone)]
pub struct FitSample {
    pub basis: BasisTensorSet,
    pub riemann: Tensor4,
}

impl FitSample {
    pub fn new(t: &FrameTensors, h: &DMatrix<f64>, riemann: Tensor4) -> Self {
        Self {
            basis: BasisTensorSet::new(t, h),
            riemann,
        }
    }

    pub fn from_analysis(pa: &PointAnalysis) -> Self {
        Self::new(&pa.tensors, &pa.h.matrix, pa.curvature.riemann.clone())
    }
}

/// Relative singular-value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-8;
/// Below this norm the curvature tensor counts as zero.
pub const ZERO_CURVATURE: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionFit {
    pub coeffs: Coefficients,
    /// `|A f - R| / |R|`, or 0 for a trivial fit.
    pub residual: f64,
    pub abs_residual: f64,
    pub singular_values: Vec<f64>,
    /// Unit coefficient directions that do not change `sum f_i R_i`.
    pub nullspace: Vec<Vec<f64>>,
    /// The curvature tensor vanishes: coefficients are undetermined.
    pub trivial: bool,
    #[serde(skip)]
    design: DMatrix<f64>,
    #[serde(skip)]
    target: DVector<f64>,
}

/// Minimum-norm least-squares writing of `R` over `tags`, with all sample
/// points stacked into one design matrix. Rows are the components of
/// `R(E_i, E_j) E_k` for `i < j`.
pub fn fit(samples: &[FitSample], tags: &[BasisTag]) -> Result<DecompositionFit> {
    if samples.is_empty() {
        return Err(GeomError::Usage("fit needs at least one sample".into()));
    }
    if tags.is_empty() {
        return Err(GeomError::Usage("fit needs at least one basis tensor".into()));
    }
    let m = samples[0].riemann.dim();
    let rows_per = m * (m - 1) / 2 * m * m;
    let nrows = rows_per * samples.len();
    let mut a = DMatrix::zeros(nrows, tags.len());
    let mut b = DVector::zeros(nrows);
    for (s_idx, s) in samples.iter().enumerate() {
        let mut row = s_idx * rows_per;
        for i in 0..m {
            for j in (i + 1)..m {
                for k in 0..m {
                    for l in 0..m {
                        b[row] = s.riemann.get(i, j, k, l);
                        for (c, tag) in tags.iter().enumerate() {
                            a[(row, c)] = s.basis.get(*tag).get(i, j, k, l);
                        }
                        row += 1;
                    }
                }
            }
        }
    }
    let r_norm = b.norm();
    let trivial = r_norm <= ZERO_CURVATURE;
    let ls = lstsq::solve(&a, &b, RANK_TOL)?;
    let x = if trivial {
        DVector::zeros(tags.len())
    } else {
        ls.x.clone()
    };
    let nullspace = ls.nullspace();
    let sv = ls.singular_values;
    let abs_residual = (&a * &x - &b).norm();
    let residual = if trivial { 0.0 } else { abs_residual / r_norm };
    Ok(DecompositionFit {
        coeffs: Coefficients::new(tags.to_vec(), x.iter().cloned().collect()),
        residual,
        abs_residual,
        singular_values: sv,
        nullspace,
        trivial,
        design: a,
        target: b,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub rank: usize,
    pub nullity: usize,
    pub unique: bool,
}

pub fn uniqueness_certificate(fit: &DecompositionFit) -> Certificate {
    let n = fit.coeffs.tags.len();
    let nullity = fit.nullspace.len();
    Certificate {
        rank: n - nullity,
        nullity,
        unique: nullity == 0,
    }
}

impl DecompositionFit {
    pub fn certificate(&self) -> Certificate {
        uniqueness_certificate(self)
    }

    /// Projects coefficient vector `v` onto the row space of the design
    /// matrix, removing nullspace components.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = v.clone();
        for n in &self.nullspace {
            let n = DVector::from_column_slice(n);
            let c = n.dot(v);
            out -= n * c;
        }
        out
    }

    /// Relative residual of an arbitrary coefficient vector on this design.
    pub fn residual_of(&self, coeffs: &Coefficients) -> Result<f64> {
        let v = self.align(coeffs)?;
        let r = (&self.design * v - &self.target).norm();
        Ok(if self.trivial {
            r
        } else {
            r / self.target.norm()
        })
    }

    fn align(&self, coeffs: &Coefficients) -> Result<DVector<f64>> {
        let mut v = DVector::zeros(self.coeffs.tags.len());
        for (tag, val) in coeffs.tags.iter().zip(&coeffs.values) {
            match self.coeffs.tags.iter().position(|t| t == tag) {
                Some(i) => v[i] = *val,
                None if *val == 0.0 => {}
                None => {
                    return Err(GeomError::Usage(format!(
                        "{} is not part of the fitted basis",
                        tag.as_str()
                    )))
                }
            }
        }
        Ok(v)
    }

    /// Compares the fit with predicted coefficients: max componentwise
    /// difference after removing nullspace directions, and the relative
    /// residual of the prediction itself.
    pub fn compare(&self, predicted: &Coefficients) -> Result<PredictionComparison> {
        let p = self.align(predicted)?;
        let diff = self.project(&(self.coeffs.as_vector() - &p));
        Ok(PredictionComparison {
            max_coeff_diff: diff.amax(),
            prediction_residual: self.residual_of(predicted)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictionComparison {
    pub max_coeff_diff: f64,
    pub prediction_residual: f64,
}

/// Which dimension-3 writing to predict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dim3Form {
    /// `R = (tau/2 - 2k) R1 + (tau/2 - 3k) R3 + mu R4 + nu R7`
    Tau(f64),
    /// `R = F R1 + (F - k) R3 + mu R4 + nu R7`, `F` the phi-sectional curvature
    PhiSectional(f64),
    /// Closed forms in terms of `kappa` only.
    Closed,
    /// `h = 0`: trans-Sasakian writing `(tau/2 + 2 b^2) R1 + (tau/2 + 3 b^2) R3`
    /// with `b = 0` (cosymplectic) or `b^2 = 1` (Kenmotsu).
    TransSasakian(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictInput {
    pub class: StructureTag,
    pub dim: usize,
    pub kappa: f64,
    pub mu: f64,
    pub nu: f64,
    /// Used in dimension 3 only.
    pub dim3: Dim3Form,
}

/// Expected divided-basis coefficients from the writing theorems.
pub fn predict_closed_form(input: &PredictInput) -> Result<Coefficients> {
    use BasisTag::*;
    let PredictInput {
        class,
        dim,
        kappa,
        mu,
        nu,
        dim3,
    } = *input;
    let alpha = match class {
        StructureTag::AlmostCosymplectic => 0.0,
        StructureTag::AlmostKenmotsu => 1.0,
        other => {
            return Err(GeomError::Usage(format!(
                "no closed form for class {}",
                other.as_str()
            )))
        }
    };
    if dim < 3 || dim % 2 == 0 {
        return Err(GeomError::Usage(format!("invalid dimension {dim}")));
    }
    let bound = -alpha * alpha;
    let mut c = Coefficients::zeros(&DIVIDED);
    let need_h = |kappa: f64| -> Result<()> {
        if kappa < bound {
            Ok(())
        } else {
            Err(GeomError::Usage(format!(
                "kappa = {kappa} is outside the range kappa < {bound} of this writing"
            )))
        }
    };
    if dim >= 5 {
        need_h(kappa)?;
        if alpha == 0.0 {
            c.set(R3, -kappa);
            c.set(R52, -1.0);
            c.set(R6, -mu);
            c.set(R8, -nu);
        } else {
            c.set(R1, -1.0);
            c.set(R3, -(kappa + 1.0));
            c.set(R52, -1.0);
            c.set(R6, -mu);
            c.set(R7, 1.0);
            c.set(R8, -(nu - 1.0));
        }
        return Ok(c);
    }
    let (f1, f3) = match dim3 {
        Dim3Form::Tau(tau) => (0.5 * tau - 2.0 * kappa, 0.5 * tau - 3.0 * kappa),
        Dim3Form::PhiSectional(f) => (f, f - kappa),
        Dim3Form::Closed => {
            need_h(kappa)?;
            if alpha == 0.0 {
                (-kappa, -2.0 * kappa)
            } else {
                (-(kappa + 2.0), -2.0 * (kappa + 1.0))
            }
        }
        Dim3Form::TransSasakian(tau) => {
            if (kappa - bound).abs() > 1e-6 {
                return Err(GeomError::Usage(format!(
                    "trans-Sasakian writing needs h = 0, i.e. kappa = {bound}, got {kappa}"
                )));
            }
            let b2 = alpha * alpha;
            (0.5 * tau + 2.0 * b2, 0.5 * tau + 3.0 * b2)
        }
    };
    c.set(R1, f1);
    c.set(R3, f3);
    if !matches!(dim3, Dim3Form::TransSasakian(_)) {
        c.set(R4, mu);
        c.set(R7, nu);
    }
    Ok(c)
}

pub const DIM3_TOL: f64 = 1e-8;

/// `R2 = 3(R1 + R3)`, `R6 = -R4`, `R8 = -R7` and
/// `R5,2 = (kappa + alpha^2)(R1 + R3)` on a 3-dimensional sample.
pub fn verify_dim3_identities(basis: &BasisTensorSet, kappa: f64, alpha: f64) -> Result<Vec<Check>> {
    use BasisTag::*;
    let m = basis.get(R1).dim();
    if m != 3 {
        return Err(GeomError::Usage(format!(
            "dimension-3 identities requested in dimension {m}"
        )));
    }
    let r13 = basis.get(R1).lin_comb(1.0, basis.get(R3), 1.0);
    let res = |a: &Tensor4, b: &Tensor4| a.lin_comb(1.0, b, -1.0).amax();
    Ok(vec![
        Check::new("R2 = 3(R1 + R3)", res(basis.get(R2), &r13.scaled(3.0)), DIM3_TOL),
        Check::new("R6 = -R4", res(basis.get(R6), &basis.get(R4).scaled(-1.0)), DIM3_TOL),
        Check::new("R8 = -R7", res(basis.get(R8), &basis.get(R7).scaled(-1.0)), DIM3_TOL),
        Check::new(
            "R5,2 = (kappa + alpha^2)(R1 + R3)",
            res(basis.get(R52), &r13.scaled(kappa + alpha * alpha)),
            DIM3_TOL,
        ),
    ])
}

pub const OBSTRUCTION_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct Infeasibility {
    pub undivided_residual: f64,
    pub divided_residual: f64,
    pub obstruction: bool,
}

/// Fits with the undivided basis; an obstruction is confirmed when its
/// relative residual exceeds [`OBSTRUCTION_THRESHOLD`].
pub fn infeasibility_check(samples: &[FitSample]) -> Result<Infeasibility> {
    let undivided = fit(samples, &UNDIVIDED)?;
    let divided = fit(samples, &DIVIDED)?;
    Ok(Infeasibility {
        undivided_residual: undivided.residual,
        divided_residual: divided.residual,
        obstruction: undivided.residual > OBSTRUCTION_THRESHOLD,
    })
}

pub const CONSISTENCY_FIT_TOL: f64 = 1e-6;
pub const CONSISTENCY_ERROR: f64 = 1e-4;

/// `(f1 - f3, f4 - f6, f7 - f8)` from a fit, checked against an extracted
/// triple when one is given. `None` for a trivial fit.
pub fn consistency_kmn_from_fit(
    fit: &DecompositionFit,
    extracted: Option<[f64; 3]>,
) -> Result<Option<[f64; 3]>> {
    if fit.trivial {
        return Ok(None);
    }
    if fit.residual > CONSISTENCY_FIT_TOL {
        return Err(GeomError::Usage(format!(
            "fit residual {:e} too large to read off (kappa, mu, nu)",
            fit.residual
        )));
    }
    let k = fit.coeffs.kmn();
    if let Some(e) = extracted {
        let diff = k
            .iter()
            .zip(&e)
            .fold(0.0, |a: f64, (x, y)| a.max((x - y).abs()));
        if diff > CONSISTENCY_ERROR {
            return Err(GeomError::Inconsistency(format!(
                "fit gives (kappa, mu, nu) = {k:?}, extraction gives {e:?}"
            )));
        }
    }
    Ok(Some(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_tensors(m: usize) -> FrameTensors {
        let n = (m - 1) / 2;
        let mut phi = DMatrix::zeros(m, m);
        for i in 0..n {
            phi[(1 + n + i, 1 + i)] = 1.0;
            phi[(1 + i, 1 + n + i)] = -1.0;
        }
        let mut xi = DVector::zeros(m);
        xi[0] = 1.0;
        FrameTensors {
            phi,
            eta: xi.clone(),
            xi,
            gram: DMatrix::identity(m, m),
        }
    }

    fn kenmotsu_h(m: usize, lambda: f64) -> DMatrix<f64> {
        let n = (m - 1) / 2;
        let mut h = DMatrix::zeros(m, m);
        for i in 0..n {
            h[(1 + n + i, 1 + i)] = lambda;
            h[(1 + i, 1 + n + i)] = lambda;
        }
        h
    }

    #[test]
    fn r1_on_orthonormal_pair() {
        let t = std_tensors(5);
        let h = kenmotsu_h(5, 1.0);
        let e = |i: usize| DVector::from_fn(5, |k, _| if k == i { 1.0 } else { 0.0 });
        let v = eval_basis(&t, &h, &e(1), &e(2), &e(2));
        assert_eq!(v[0], e(1));
    }

    #[test]
    fn h_zero_kills_h_tensors() {
        let t = std_tensors(5);
        let basis = BasisTensorSet::new(&t, &DMatrix::zeros(5, 5));
        for tag in [BasisTag::R4, BasisTag::R5, BasisTag::R51, BasisTag::R52, BasisTag::R6, BasisTag::R7, BasisTag::R8] {
            assert_eq!(basis.get(tag).amax(), 0.0);
        }
    }

    #[test]
    fn basis_symmetries() {
        let t = std_tensors(5);
        let h = kenmotsu_h(5, 0.8);
        let basis = BasisTensorSet::new(&t, &h);
        for tag in BasisTag::ALL {
            assert!(basis.get(tag).antisymmetry_residual() < 1e-14, "{tag:?}");
        }
        let split = basis.get(BasisTag::R51).lin_comb(1.0, basis.get(BasisTag::R52), -1.0);
        assert!(split.lin_comb(1.0, basis.get(BasisTag::R5), -1.0).amax() < 1e-14);
    }

    #[test]
    fn dim3_identities_on_synthetic_h() {
        // h with eigenvalues +-l on e1, e2 and phi e1 = e2
        let t = std_tensors(3);
        let l = 1.3;
        let h = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, l, 0.0, 0.0, 0.0, -l]);
        let basis = BasisTensorSet::new(&t, &h);
        let checks = verify_dim3_identities(&basis, -l * l, 0.0).unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        assert!(verify_dim3_identities(&BasisTensorSet::new(&std_tensors(5), &DMatrix::zeros(5, 5)), 0.0, 0.0).is_err());
    }

    #[test]
    fn fit_recovers_synthetic_combination() {
        let t = std_tensors(5);
        let h = kenmotsu_h(5, 0.6);
        let basis = BasisTensorSet::new(&t, &h);
        let truth = Coefficients::divided([0.3, -0.2, 1.1, 0.5, 0.7, -1.0, 0.4, 0.9, -0.6]);
        let r = basis.combine(&truth);
        let s = FitSample { basis, riemann: r };
        let f = fit(&[s], &DIVIDED).unwrap();
        assert!(f.certificate().unique);
        for (a, b) in f.coeffs.values.iter().zip(&truth.values) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(f.residual < 1e-9, "{} {:?}", f.residual, f.coeffs);
    }

    #[test]
    fn predictions_match_worked_values() {
        use BasisTag::*;
        let cos = predict_closed_form(&PredictInput {
            class: StructureTag::AlmostCosymplectic,
            dim: 5,
            kappa: -1.0,
            mu: 2.0,
            nu: 0.0,
            dim3: Dim3Form::Closed,
        })
        .unwrap();
        assert_eq!(cos.values, vec![0.0, 0.0, 1.0, 0.0, 0.0, -1.0, -2.0, 0.0, -0.0]);
        let ken = predict_closed_form(&PredictInput {
            class: StructureTag::AlmostKenmotsu,
            dim: 5,
            kappa: -2.0,
            mu: 0.0,
            nu: 2.0,
            dim3: Dim3Form::Closed,
        })
        .unwrap();
        assert_eq!(
            (ken.value(R1), ken.value(R3), ken.value(R52), ken.value(R7), ken.value(R8)),
            (-1.0, 1.0, -1.0, 1.0, -1.0)
        );
        let d3 = predict_closed_form(&PredictInput {
            class: StructureTag::AlmostCosymplectic,
            dim: 3,
            kappa: -1.0,
            mu: 2.0,
            nu: 0.0,
            dim3: Dim3Form::PhiSectional(1.0),
        })
        .unwrap();
        assert_eq!((d3.value(R1), d3.value(R3), d3.value(R4)), (1.0, 2.0, 2.0));
        let bad = predict_closed_form(&PredictInput {
            class: StructureTag::AlmostKenmotsu,
            dim: 5,
            kappa: -0.5,
            mu: 0.0,
            nu: 0.0,
            dim3: Dim3Form::Closed,
        });
        assert!(matches!(bad, Err(GeomError::Usage(_))));
    }
}
