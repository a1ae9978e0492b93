//! D-homothetic deformations of almost cosymplectic structures:
//! `phi' = phi`, `xi' = xi / beta`, `eta' = beta eta`,
//! `g' = a g + (beta^2 - a) eta (x) eta` with a positive constant `a` and a
//! nowhere-zero function `beta` that varies only along `xi`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::lie_structure;
use crate::check::{all_passed, Check};
use crate::error::{GeomError, Result};
use crate::geometry::{Backend, Field, FieldKind, LieAlgebraSpec, MetricField, Point, ScalarField};
use crate::kmn::{analyze_point, h_field};
use crate::structure::{AlmostContactStructure, ClassifyOptions, StructureTag, AXIOM_TOL};

/// Smallest admissible `|beta|`.
pub const BETA_MIN: f64 = 1e-8;

type BetaFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The deformation function.
#[derive(Clone)]
pub enum Beta {
    Constant(f64),
    /// `beta(t)` of the chart coordinate `t = x^0`, which the chart models
    /// align with `xi`. Only valid on the chart backend.
    OfT { label: String, f: BetaFn },
}

impl Beta {
    pub fn of_t<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Beta::OfT {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Beta::Constant(b) => format!("{b}"),
            Beta::OfT { label, .. } => label.clone(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Beta::Constant(_))
    }

    /// Value at `p`; fails with a parameter error where `|beta| < BETA_MIN`.
    pub fn eval(&self, p: &Point) -> Result<f64> {
        let v = match self {
            Beta::Constant(b) => *b,
            Beta::OfT { f, .. } => f(p.coord(0)),
        };
        if !v.is_finite() || v.abs() < BETA_MIN {
            return Err(GeomError::Parameter(format!(
                "beta = {v} at {:?} (must be finite with |beta| >= {BETA_MIN:e})",
                p.coords()
            )));
        }
        Ok(v)
    }

    pub fn field(&self) -> ScalarField {
        let beta = self.clone();
        Field::new(FieldKind::Scalar, move |p| beta.eval(p))
    }
}

impl fmt::Debug for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Constant(b) => f.debug_tuple("Constant").field(b).finish(),
            Beta::OfT { label, .. } => f.debug_struct("OfT").field("label", label).finish(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DeformationParams {
    /// The positive constant scaling `g` (named to avoid a clash with the
    /// structure's own alpha).
    pub alpha_d: f64,
    pub beta: Beta,
}

impl DeformationParams {
    pub fn new(alpha_d: f64, beta: Beta) -> Self {
        Self { alpha_d, beta }
    }

    pub fn constant(alpha_d: f64, beta: f64) -> Self {
        Self::new(alpha_d, Beta::Constant(beta))
    }

    fn check(&self, backend: &Backend, points: &[Point]) -> Result<()> {
        if !(self.alpha_d.is_finite() && self.alpha_d > 0.0) {
            return Err(GeomError::Parameter(format!(
                "alpha_d must be a positive constant, got {}",
                self.alpha_d
            )));
        }
        if backend.is_lie() && !self.beta.is_constant() {
            return Err(GeomError::Usage(
                "a non-constant beta needs a coordinate along xi; Lie models only accept a constant beta"
                    .into(),
            ));
        }
        if let Beta::Constant(_) = self.beta {
            self.beta.eval(&Point::identity())?;
        }
        for p in points {
            self.beta.eval(p)?;
        }
        Ok(())
    }
}

/// Deformed structure. `points` are only used to check that `beta` does not
/// vanish there. The transformation laws are stated for almost cosymplectic
/// structures; [`verify_laws`] checks that precondition.
pub fn apply(
    s: &AlmostContactStructure,
    params: &DeformationParams,
    points: &[Point],
) -> Result<AlmostContactStructure> {
    params.check(s.backend(), points)?;
    let a = params.alpha_d;
    let beta = params.beta.clone();
    match s.backend() {
        Backend::Lie(spec) => {
            let p = Point::identity();
            let b = beta.eval(&p)?;
            let eta = s.eta().eval(&p)?;
            let gram = spec.metric() * a + &eta * eta.transpose() * (b * b - a);
            let spec = LieAlgebraSpec::new(spec.constants().clone(), gram)?;
            lie_structure(
                spec,
                s.phi().eval(&p)?,
                s.xi().eval(&p)? / b,
                eta * b,
            )
        }
        Backend::Chart(_) => {
            let xi = {
                let (xi, beta) = (s.xi().clone(), beta.clone());
                Field::new(FieldKind::Vector, move |p| Ok(xi.eval(p)? / beta.eval(p)?))
            };
            let eta = {
                let (eta, beta) = (s.eta().clone(), beta.clone());
                Field::new(FieldKind::OneForm, move |p| Ok(eta.eval(p)? * beta.eval(p)?))
            };
            let correction = {
                let (eta, beta) = (s.eta().clone(), beta.clone());
                move |p: &Point| -> Result<DMatrix<f64>> {
                    let e = eta.eval(p)?;
                    let b = beta.eval(p)?;
                    Ok(&e * e.transpose() * (b * b - a))
                }
            };
            let value = {
                let (g, c) = (s.metric().clone(), correction.clone());
                Field::new(FieldKind::Metric, move |p| Ok(g.eval(p)? * a + c(p)?))
            };
            let mut metric = MetricField::new(value);
            if s.metric().has_analytic_derivative() {
                // keep the original's analytic part; only the rank-one
                // correction is differenced
                let g = s.metric().clone();
                let backend = s.backend_arc();
                metric = metric.with_derivative(move |p, dir| {
                    let dg = g
                        .analytic_derivative(p, dir)
                        .expect("checked above")?;
                    Ok(dg * a + backend.derivative(p, dir, &correction)?)
                });
            }
            AlmostContactStructure::new(s.backend_arc(), metric, s.phi().clone(), xi, eta)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawOptions {
    pub tol: f64,
    /// Random vector pairs per point for the connection law.
    pub pairs: usize,
    pub seed: u64,
}

impl Default for LawOptions {
    fn default() -> Self {
        Self {
            tol: 1e-5,
            pairs: 8,
            seed: 42,
        }
    }
}

/// Values at one sample point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointLaw {
    pub point: Vec<f64>,
    pub beta: f64,
    pub xi_beta: f64,
    /// `(kappa, mu, nu)` of the original structure.
    pub original: [f64; 3],
    /// `(kappa / beta^2, mu / beta, (nu beta - xi(beta)) / beta^2)`.
    pub predicted: [f64; 3],
    /// Re-extracted from the deformed curvature.
    pub extracted: [f64; 3],
    /// `h` vanishes, so only `kappa` is identifiable.
    pub h_vanishes: bool,
    pub h_residual: f64,
    pub connection_residual: f64,
    pub kmn_residual: f64,
    pub horizontal_beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeformationReport {
    pub alpha_d: f64,
    pub beta: String,
    pub deformed_class: StructureTag,
    pub points: Vec<PointLaw>,
    pub checks: Vec<Check>,
}

impl DeformationReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

pub const CHECK_VALIDATES: &str = "deformed structure satisfies the axioms";
pub const CHECK_CLASS: &str = "deformed structure is almost cosymplectic";
pub const CHECK_BETA_ALONG_XI: &str = "beta varies only along xi";
pub const CHECK_H: &str = "h' = h / beta";
pub const CHECK_CONNECTION: &str =
    "nabla'_X Y = nabla_X Y - ((beta^2 - a)/beta^2) g(phi h X, Y) xi + (xi(beta)/beta) eta(X) eta(Y) xi";
pub const CHECK_KMN: &str = "(kappa', mu', nu') = (kappa/beta^2, mu/beta, (nu beta - xi(beta))/beta^2)";

/// Deforms `s` and checks the transformation laws of `h`, the Levi-Civita
/// connection and `(kappa, mu, nu)` at every sample point. The deformed `h`
/// and `(kappa, mu, nu)` are recomputed from scratch on the deformed
/// structure.
pub fn verify_laws(
    s: &AlmostContactStructure,
    params: &DeformationParams,
    points: &[Point],
    opts: &LawOptions,
) -> Result<DeformationReport> {
    if points.is_empty() {
        return Err(GeomError::Usage("deformation needs at least one sample point".into()));
    }
    let class_opts = ClassifyOptions {
        seed: opts.seed,
        ..ClassifyOptions::default()
    };
    let original_class = s.classify(points, &class_opts)?;
    if original_class.tag != StructureTag::AlmostCosymplectic {
        return Err(GeomError::Usage(format!(
            "deformation laws hold for almost cosymplectic structures, got {}",
            original_class.tag.as_str()
        )));
    }
    let deformed = apply(s, params, points)?;
    let validation = deformed.validate(points)?;
    let class = deformed.classify(points, &class_opts)?;
    let laws: Vec<PointLaw> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| point_law(s, &deformed, params, p, opts, opts.seed.wrapping_add(i as u64)))
        .collect::<Result<_>>()?;

    let worst = |f: fn(&PointLaw) -> f64| laws.iter().map(f).fold(0.0, f64::max);
    let checks = vec![
        Check::new(CHECK_VALIDATES, validation.max_residual(), AXIOM_TOL),
        Check {
            passed: class.tag == StructureTag::AlmostCosymplectic
                && class.tag_residual() <= class_opts.tol,
            ..Check::new(CHECK_CLASS, class.tag_residual(), class_opts.tol)
        },
        Check::new(CHECK_BETA_ALONG_XI, worst(|l| l.horizontal_beta), opts.tol),
        Check::new(CHECK_H, worst(|l| l.h_residual), opts.tol),
        Check::new(CHECK_CONNECTION, worst(|l| l.connection_residual), opts.tol),
        Check::new(CHECK_KMN, worst(|l| l.kmn_residual), opts.tol),
    ];
    Ok(DeformationReport {
        alpha_d: params.alpha_d,
        beta: params.beta.label(),
        deformed_class: class.tag,
        points: laws,
        checks,
    })
}

fn point_law(
    s: &AlmostContactStructure,
    deformed: &AlmostContactStructure,
    params: &DeformationParams,
    p: &Point,
    opts: &LawOptions,
    seed: u64,
) -> Result<PointLaw> {
    let backend = s.backend();
    let m = s.dim();
    let a = params.alpha_d;
    let beta_field = params.beta.field();
    let beta = beta_field.eval(p)?;
    let xi = s.xi().eval(p)?;
    let eta = s.eta().eval(p)?;
    let g = s.metric().eval(p)?;
    let phi = s.phi().eval(p)?;
    let xi_beta = backend.directional(p, xi.as_slice(), |q| beta_field.eval(q))?;

    let before = analyze_point(s, 0.0, p, None, seed)?;
    let horizontal_beta = (1..m)
        .map(|i| {
            let e = before.curvature.frame.vector(i);
            backend
                .directional(p, e.as_slice(), |q| beta_field.eval(q))
                .map(f64::abs)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let h = before.h.backend_matrix.clone();
    let h_bar = h_field(deformed).eval(p)?;
    let h_residual = (h_bar - &h / beta).amax();

    let gamma = s.connection().christoffel(p)?;
    let gamma_bar = deformed.connection().christoffel(p)?;
    let phi_h = &phi * &h;
    let shear = (beta * beta - a) / (beta * beta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut connection_residual: f64 = 0.0;
    for _ in 0..opts.pairs {
        let x = DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0));
        let y = DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0));
        let got = (gamma_bar.along(&x) - gamma.along(&x)) * &y;
        let gphx_y = (&phi_h * &x).dot(&(&g * &y));
        let want = &xi * (-shear * gphx_y + xi_beta / beta * eta.dot(&x) * eta.dot(&y));
        connection_residual = connection_residual.max((got - want).amax());
    }

    let [kappa, mu, nu] = before.kmn.triple();
    let predicted = [
        kappa / (beta * beta),
        mu / beta,
        (nu * beta - xi_beta) / (beta * beta),
    ];
    let after = analyze_point(deformed, 0.0, p, None, seed)?;
    let extracted = after.kmn.triple();
    let h_vanishes = before.kmn.h_vanishes || after.kmn.h_vanishes;
    let compared = if h_vanishes { 1 } else { 3 };
    let kmn_residual = (0..compared)
        .map(|i| (extracted[i] - predicted[i]).abs())
        .fold(0.0, f64::max);

    Ok(PointLaw {
        point: p.coords().to_vec(),
        beta,
        xi_beta,
        original: before.kmn.triple(),
        predicted,
        extracted,
        h_vanishes,
        h_residual,
        connection_residual,
        kmn_residual,
        horizontal_beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use std::collections::BTreeMap;

    fn model(name: &str, params: &[(&str, f64)]) -> catalog::Model {
        let p: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        catalog::build(name, &p).unwrap()
    }

    #[test]
    fn constant_beta_on_lie_model_adds_eta_squared() {
        let m = model("cosym5", &[("b", 0.0), ("c", 2.0)]);
        let d = apply(&m.structure, &DeformationParams::constant(1.0, 2.0), &[]).unwrap();
        let p = Point::identity();
        let g = d.metric().eval(&p).unwrap();
        let mut want = DMatrix::identity(5, 5);
        want[(0, 0)] = 4.0;
        assert!((g - want).amax() < 1e-15);
        assert!((d.xi().eval(&p).unwrap()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_beta_and_bad_alpha_are_parameter_errors() {
        let m = model("cosym3", &[]);
        let e = apply(&m.structure, &DeformationParams::constant(1.0, 0.0), &[]).unwrap_err();
        assert!(matches!(e, GeomError::Parameter(_)));
        let e = apply(&m.structure, &DeformationParams::constant(0.0, 1.0), &[]).unwrap_err();
        assert!(matches!(e, GeomError::Parameter(_)));
        let chart = model("cosym_flat", &[]);
        let params = DeformationParams::new(1.0, Beta::of_t("t", |t| t));
        let e = apply(&chart.structure, &params, &[Point::new(vec![0.0; 3])]).unwrap_err();
        assert!(matches!(e, GeomError::Parameter(_)));
    }

    #[test]
    fn lie_model_rejects_nonconstant_beta() {
        let m = model("cosym3", &[]);
        let params = DeformationParams::new(1.0, Beta::of_t("exp(t)", f64::exp));
        let e = apply(&m.structure, &params, &[]).unwrap_err();
        assert!(matches!(e, GeomError::Usage(_)));
    }

    #[test]
    fn laws_hold_on_cosym5_with_beta_two() {
        let m = model("cosym5", &[("b", 0.0), ("c", 2.0)]);
        let points = m.sample_points(1, 42);
        let r = verify_laws(
            &m.structure,
            &DeformationParams::constant(1.0, 2.0),
            &points,
            &LawOptions::default(),
        )
        .unwrap();
        assert!(r.passed(), "{:#?}", r.checks);
        let e = r.points[0].extracted;
        assert!((e[0] + 0.25).abs() < 1e-8 && (e[1] - 1.0).abs() < 1e-8 && e[2].abs() < 1e-8);
    }

    #[test]
    fn laws_hold_with_nonconstant_beta_on_chart() {
        let m = model("cosym_solvable", &[]);
        let points = m.sample_points(3, 42);
        let params = DeformationParams::new(1.0, Beta::of_t("exp(t)", f64::exp));
        let r = verify_laws(&m.structure, &params, &points, &LawOptions::default()).unwrap();
        assert!(r.passed(), "{:#?}", r.checks);
        for l in &r.points {
            let t = l.point[0];
            assert!((l.extracted[2] + (-t).exp()).abs() < 1e-5, "{l:?}");
        }
    }

    #[test]
    fn kenmotsu_structure_is_rejected() {
        let m = model("kenmotsu3", &[]);
        let e = verify_laws(
            &m.structure,
            &DeformationParams::constant(1.0, 2.0),
            &m.sample_points(1, 42),
            &LawOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(e, GeomError::Usage(_)));
    }
}
