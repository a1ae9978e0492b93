//! Built-in example manifolds with independently derived ground truth.
//!
//! Lie models use a basis `(xi, ...)` with `xi` first and an orthonormal
//! left-invariant metric. Chart models use coordinates `(t, ...)` with
//! `xi = d/dt`, so a deformation function `beta(t)` varies only along `xi`.
//!
//! Expected values for the Lie models come from expanding brackets by hand:
//!
//! * `cosym(b, c)`: `[xi, e1] = b e2`, `[xi, e2] = c e1`, `phi e1 = e2`. Then
//!   `(L_xi phi) e1 = [xi, e2] - phi(b e2) = (b + c) e1`, so `h` has
//!   eigenvalues `±(b+c)/2 = ±lambda`. Koszul gives
//!   `2 g(nabla_xi e1, e2) = b - c`, hence `mu = -2 g(nabla_xi e1, phi e1) = c - b`,
//!   `kappa = -lambda^2`, `nu = 0`.
//! * `kenmotsu(lambda)`: `[xi, X_i] = -(1+lambda) X_i`,
//!   `[xi, Y_i] = -(1-lambda) Y_i`, `phi X_i = Y_i`. Then `h X_i = lambda Y_i`,
//!   `dPhi(xi, X_i, Y_i) = -2 = 2 (eta ^ Phi)(xi, X_i, Y_i)` and
//!   `(kappa, mu, nu) = (-1 - lambda^2, 0, 2)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::decomp::Coefficients;
use crate::error::{GeomError, Result};
use crate::geometry::{
    Backend, Chart, Field, FieldKind, LieAlgebraSpec, MetricField, Point, StructureConstants,
};
use crate::structure::{AlmostContactStructure, StructureTag};

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    /// Printed in the literature for this family of examples.
    Published,
    /// Worked out by hand from the brackets or the metric, independently of
    /// the engine.
    HandDerived,
    /// Holds by construction (flat metric, constant structure).
    Construction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expected<T> {
    pub value: T,
    pub origin: Origin,
}

fn exp<T>(value: T, origin: Origin) -> Expected<T> {
    Expected { value, origin }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectedValues {
    pub class: Expected<StructureTag>,
    pub alpha: f64,
    /// `(kappa, mu, nu)`
    pub kmn: Expected<[f64; 3]>,
    pub lambda: Expected<f64>,
    /// Divided-basis coefficients `(f1, f2, f3, f4, f5,1, f5,2, f6, f7, f8)`.
    pub divided: Option<Expected<Coefficients>>,
    /// Undivided coefficients `(f1, ..., f8)` of a valid writing (dimension 3).
    pub undivided: Option<Expected<Vec<f64>>>,
    /// Constant sectional curvature, when the model has one.
    pub sectional: Option<Expected<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    /// Open lower bound, if any.
    pub min_exclusive: Option<f64>,
    pub integer: bool,
    pub description: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogSummary {
    pub name: &'static str,
    pub backend: &'static str,
    pub description: &'static str,
    pub params: Vec<ParamSpec>,
    pub expected_class: StructureTag,
}

/// A built model: the structure plus its expected values.
#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub structure: AlmostContactStructure,
    pub expected: ExpectedValues,
}

impl Model {
    /// Sample points: the identity for Lie models; `count` seeded random
    /// points in the inner half of the chart box otherwise (the first one is
    /// the box centre).
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Point> {
        sample_points(self.structure.backend(), count, seed)
    }
}

pub fn sample_points(backend: &Backend, count: usize, seed: u64) -> Vec<Point> {
    match backend {
        Backend::Lie(_) => vec![Point::identity()],
        Backend::Chart(chart) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let centre: Vec<f64> = chart
                .lower()
                .iter()
                .zip(chart.upper())
                .map(|(l, u)| 0.5 * (l + u))
                .collect();
            let half: Vec<f64> = chart
                .lower()
                .iter()
                .zip(chart.upper())
                .map(|(l, u)| 0.25 * (u - l))
                .collect();
            let mut out = vec![Point::new(centre.clone())];
            while out.len() < count.max(1) {
                let c = centre
                    .iter()
                    .zip(&half)
                    .map(|(c, h)| c + h * rng.gen_range(-1.0..1.0))
                    .collect();
                out.push(Point::new(c));
            }
            out
        }
    }
}

const N_PARAM: ParamSpec = ParamSpec {
    name: "n",
    default: 1.0,
    min_exclusive: Some(0.0),
    integer: true,
    description: "half of (dimension - 1)",
};

fn bc_params() -> Vec<ParamSpec> {
    vec![
        ParamSpec {
            name: "b",
            default: 0.0,
            min_exclusive: None,
            integer: false,
            description: "[xi, e1] = b e2",
        },
        ParamSpec {
            name: "c",
            default: 2.0,
            min_exclusive: None,
            integer: false,
            description: "[xi, e2] = c e1",
        },
    ]
}

fn lambda_param() -> ParamSpec {
    ParamSpec {
        name: "lambda",
        default: 1.0,
        min_exclusive: Some(0.0),
        integer: false,
        description: "eigenvalue of h",
    }
}

pub fn list() -> Vec<CatalogSummary> {
    use StructureTag::*;
    vec![
        CatalogSummary {
            name: "cosym_flat",
            backend: "chart",
            description: "R^(2n+1) with the standard flat cosymplectic structure",
            params: vec![N_PARAM],
            expected_class: AlmostCosymplectic,
        },
        CatalogSummary {
            name: "kenmotsu_warped",
            backend: "chart",
            description: "warped product dt^2 + c e^(2t) (flat Kaehler R^2n)",
            params: vec![
                N_PARAM,
                ParamSpec {
                    name: "c",
                    default: 1.0,
                    min_exclusive: Some(0.0),
                    integer: false,
                    description: "warping constant",
                },
            ],
            expected_class: AlmostKenmotsu,
        },
        CatalogSummary {
            name: "cosym3",
            backend: "lie",
            description: "3-dimensional almost cosymplectic Lie group",
            params: bc_params(),
            expected_class: AlmostCosymplectic,
        },
        CatalogSummary {
            name: "cosym5",
            backend: "lie",
            description: "5-dimensional almost cosymplectic Lie group",
            params: bc_params(),
            expected_class: AlmostCosymplectic,
        },
        CatalogSummary {
            name: "cosym_solvable",
            backend: "chart",
            description: "coordinate realisation of the cosym(b, c) Lie group",
            params: {
                let mut p = vec![ParamSpec {
                    default: 2.0,
                    ..N_PARAM
                }];
                p.extend(bc_params());
                p
            },
            expected_class: AlmostCosymplectic,
        },
        CatalogSummary {
            name: "kenmotsu3",
            backend: "lie",
            description: "3-dimensional almost Kenmotsu Lie group",
            params: vec![lambda_param()],
            expected_class: AlmostKenmotsu,
        },
        CatalogSummary {
            name: "kenmotsu5",
            backend: "lie",
            description: "5-dimensional almost Kenmotsu Lie group",
            params: vec![lambda_param()],
            expected_class: AlmostKenmotsu,
        },
    ]
}

fn resolve_params(
    summary: &CatalogSummary,
    given: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, f64>> {
    for key in given.keys() {
        if !summary.params.iter().any(|p| p.name == key) {
            return Err(GeomError::Parameter(format!(
                "{} has no parameter '{key}'",
                summary.name
            )));
        }
    }
    let mut out = BTreeMap::new();
    for spec in &summary.params {
        let v = given.get(spec.name).copied().unwrap_or(spec.default);
        if !v.is_finite() {
            return Err(GeomError::Parameter(format!("{} must be finite", spec.name)));
        }
        if let Some(min) = spec.min_exclusive {
            if v <= min {
                return Err(GeomError::Parameter(format!(
                    "{} must be > {min}, got {v}",
                    spec.name
                )));
            }
        }
        if spec.integer && v.fract() != 0.0 {
            return Err(GeomError::Parameter(format!(
                "{} must be an integer, got {v}",
                spec.name
            )));
        }
        out.insert(spec.name.to_string(), v);
    }
    Ok(out)
}

pub fn build(name: &str, params: &BTreeMap<String, f64>) -> Result<Model> {
    let summary = list()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| GeomError::Parameter(format!("unknown catalog entry '{name}'")))?;
    let p = resolve_params(&summary, params)?;
    let get = |k: &str| p[k];
    let (structure, expected) = match name {
        "cosym_flat" => cosym_flat(get("n") as usize)?,
        "kenmotsu_warped" => kenmotsu_warped(get("n") as usize, get("c"))?,
        "cosym3" => cosym_lie(1, get("b"), get("c"))?,
        "cosym5" => cosym_lie(2, get("b"), get("c"))?,
        "cosym_solvable" => cosym_solvable(get("n") as usize, get("b"), get("c"))?,
        "kenmotsu3" => kenmotsu_lie(1, get("lambda"))?,
        "kenmotsu5" => kenmotsu_lie(2, get("lambda"))?,
        _ => unreachable!("names come from list()"),
    };
    Ok(Model {
        name: name.to_string(),
        params: p,
        structure,
        expected,
    })
}

/// `phi` on a basis whose `i`-th pair is `(first + i, second + i)` with
/// `phi(first) = second`.
fn paired_phi(m: usize, pairs: &[(usize, usize)]) -> DMatrix<f64> {
    let mut phi = DMatrix::zeros(m, m);
    for &(a, b) in pairs {
        phi[(b, a)] = 1.0;
        phi[(a, b)] = -1.0;
    }
    phi
}

fn unit(m: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(m);
    v[i] = 1.0;
    v
}

/// Builds a left-invariant structure with `xi = e_0`, `eta = e^0`.
pub fn lie_structure(
    spec: LieAlgebraSpec,
    phi: DMatrix<f64>,
    xi: DVector<f64>,
    eta: DVector<f64>,
) -> Result<AlmostContactStructure> {
    let metric = MetricField::constant(spec.metric().clone());
    AlmostContactStructure::new(
        Arc::new(Backend::Lie(spec)),
        metric,
        Field::constant(FieldKind::Endomorphism, phi),
        Field::constant(FieldKind::Vector, xi),
        Field::constant(FieldKind::OneForm, eta),
    )
}

fn cosym_flat(n: usize) -> Result<(AlmostContactStructure, ExpectedValues)> {
    let m = 2 * n + 1;
    let pairs: Vec<_> = (0..n).map(|i| (1 + i, 1 + n + i)).collect();
    let backend = Backend::Chart(Chart::cube(m, 1.0)?);
    let s = AlmostContactStructure::new(
        Arc::new(backend),
        MetricField::constant(DMatrix::identity(m, m)),
        Field::constant(FieldKind::Endomorphism, paired_phi(m, &pairs)),
        Field::constant(FieldKind::Vector, unit(m, 0)),
        Field::constant(FieldKind::OneForm, unit(m, 0)),
    )?;
    let c = Origin::Construction;
    let expected = ExpectedValues {
        class: exp(StructureTag::AlmostCosymplectic, c),
        alpha: 0.0,
        kmn: exp([0.0; 3], c),
        lambda: exp(0.0, c),
        divided: None,
        undivided: (n == 1).then(|| exp(vec![0.0; 8], c)),
        sectional: Some(exp(0.0, c)),
    };
    Ok((s, expected))
}

fn kenmotsu_warped(n: usize, c: f64) -> Result<(AlmostContactStructure, ExpectedValues)> {
    let m = 2 * n + 1;
    let pairs: Vec<_> = (0..n).map(|i| (1 + i, 1 + n + i)).collect();
    let backend = Backend::Chart(Chart::cube(m, 1.0)?);
    let gram = move |p: &Point| {
        let w = c * (2.0 * p.coord(0)).exp();
        let mut g = DMatrix::identity(m, m) * w;
        g[(0, 0)] = 1.0;
        g
    };
    let metric = MetricField::new(Field::from_fn(FieldKind::Metric, gram)).with_derivative(
        move |p: &Point, a: usize| {
            let mut d = DMatrix::zeros(m, m);
            if a == 0 {
                let w = 2.0 * c * (2.0 * p.coord(0)).exp();
                for i in 1..m {
                    d[(i, i)] = w;
                }
            }
            Ok(d)
        },
    );
    let s = AlmostContactStructure::new(
        Arc::new(backend),
        metric,
        Field::constant(FieldKind::Endomorphism, paired_phi(m, &pairs)),
        Field::constant(FieldKind::Vector, unit(m, 0)),
        Field::constant(FieldKind::OneForm, unit(m, 0)),
    )?;
    let published = Origin::Published;
    let derived = Origin::HandDerived;
    // constant curvature -1: R = -R1, so tau = -m(m-1) and in dimension 3 the
    // (R1, R3) coefficients are (tau/2 + 2, tau/2 + 3) = (-1, 0)
    let expected = ExpectedValues {
        class: exp(StructureTag::AlmostKenmotsu, published),
        alpha: 1.0,
        kmn: exp([-1.0, 0.0, 0.0], published),
        lambda: exp(0.0, published),
        divided: None,
        undivided: (n == 1).then(|| exp(vec![-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], derived)),
        sectional: Some(exp(-1.0, derived)),
    };
    Ok((s, expected))
}

fn cosym_constants(n: usize, b: f64, c: f64) -> StructureConstants {
    let m = 2 * n + 1;
    let mut k = StructureConstants::zeros(m);
    for i in 0..n {
        let e1 = 1 + 2 * i;
        let e2 = 2 + 2 * i;
        k.set_bracket(0, e1, e2, b);
        k.set_bracket(0, e2, e1, c);
    }
    k
}

fn cosym_expected(n: usize, b: f64, c: f64) -> ExpectedValues {
    let lambda = 0.5 * (b + c);
    let kappa = -lambda * lambda;
    let mu = c - b;
    let d = Origin::HandDerived;
    let divided = (n >= 2).then(|| {
        exp(
            Coefficients::divided([0.0, 0.0, -kappa, 0.0, 0.0, -1.0, -mu, 0.0, 0.0]),
            Origin::Published,
        )
    });
    let undivided = (n == 1).then(|| {
        exp(
            vec![-kappa, 0.0, -2.0 * kappa, mu, 0.0, 0.0, 0.0, 0.0],
            Origin::Published,
        )
    });
    ExpectedValues {
        class: exp(StructureTag::AlmostCosymplectic, d),
        alpha: 0.0,
        kmn: exp([kappa, mu, 0.0], d),
        lambda: exp(lambda.abs(), d),
        divided,
        undivided,
        sectional: None,
    }
}

fn cosym_lie(n: usize, b: f64, c: f64) -> Result<(AlmostContactStructure, ExpectedValues)> {
    let m = 2 * n + 1;
    let spec = LieAlgebraSpec::with_identity_metric(cosym_constants(n, b, c))?;
    let pairs: Vec<_> = (0..n).map(|i| (1 + 2 * i, 2 + 2 * i)).collect();
    let s = lie_structure(spec, paired_phi(m, &pairs), unit(m, 0), unit(m, 0))?;
    Ok((s, cosym_expected(n, b, c)))
}

/// `exp(t A)` for `A = [[0, c], [b, 0]]`.
fn exp_block(b: f64, c: f64, t: f64) -> Matrix2<f64> {
    let bc = b * c;
    if bc > 0.0 {
        let s = bc.sqrt();
        let (sh, ch) = ((s * t).sinh(), (s * t).cosh());
        Matrix2::new(ch, c * sh / s, b * sh / s, ch)
    } else if bc < 0.0 {
        let s = (-bc).sqrt();
        let (sn, cs) = (s * t).sin_cos();
        Matrix2::new(cs, c * sn / s, b * sn / s, cs)
    } else {
        Matrix2::new(1.0, c * t, b * t, 1.0)
    }
}

/// The simply connected group of `cosym(b, c)` in coordinates `(t, x)`:
/// `xi = d/dt` and `e_j = sum_k exp(tA)_{kj} d/dx^k`, which satisfies
/// `[xi, e_j] = sum_l A_{lj} e_l`.
fn cosym_solvable(n: usize, b: f64, c: f64) -> Result<(AlmostContactStructure, ExpectedValues)> {
    let m = 2 * n + 1;
    let backend = Backend::Chart(Chart::cube(m, 1.0)?);
    let a = Matrix2::new(0.0, c, b, 0.0);
    let j = Matrix2::new(0.0, -1.0, 1.0, 0.0);
    let block_metric = move |t: f64| -> (Matrix2<f64>, Matrix2<f64>) {
        let mm = exp_block(b, c, t);
        let g = (mm * mm.transpose())
            .try_inverse()
            .expect("exp(tA) is invertible");
        let dm = mm * a;
        let dg = -g * (dm * mm.transpose() + mm * dm.transpose()) * g;
        (g, dg)
    };
    let metric = MetricField::new(Field::from_fn(FieldKind::Metric, move |p: &Point| {
        let (g2, _) = block_metric(p.coord(0));
        let mut g = DMatrix::identity(m, m);
        for i in 0..n {
            let o = 1 + 2 * i;
            g.fixed_view_mut::<2, 2>(o, o).copy_from(&g2);
        }
        g
    }))
    .with_derivative(move |p: &Point, dir: usize| {
        let mut d = DMatrix::zeros(m, m);
        if dir == 0 {
            let (_, dg2) = block_metric(p.coord(0));
            for i in 0..n {
                let o = 1 + 2 * i;
                d.fixed_view_mut::<2, 2>(o, o).copy_from(&dg2);
            }
        }
        Ok(d)
    });
    let phi = Field::from_fn(FieldKind::Endomorphism, move |p: &Point| {
        let mm = exp_block(b, c, p.coord(0));
        let inv = mm.try_inverse().expect("exp(tA) is invertible");
        let block = mm * j * inv;
        let mut out = DMatrix::zeros(m, m);
        for i in 0..n {
            let o = 1 + 2 * i;
            out.fixed_view_mut::<2, 2>(o, o).copy_from(&block);
        }
        out
    });
    let s = AlmostContactStructure::new(
        Arc::new(backend),
        metric,
        phi,
        Field::constant(FieldKind::Vector, unit(m, 0)),
        Field::constant(FieldKind::OneForm, unit(m, 0)),
    )?;
    Ok((s, cosym_expected(n, b, c)))
}

fn kenmotsu_lie(n: usize, lambda: f64) -> Result<(AlmostContactStructure, ExpectedValues)> {
    let m = 2 * n + 1;
    let mut k = StructureConstants::zeros(m);
    for i in 0..n {
        k.set_bracket(0, 1 + i, 1 + i, -(1.0 + lambda));
        k.set_bracket(0, 1 + n + i, 1 + n + i, -(1.0 - lambda));
    }
    let spec = LieAlgebraSpec::with_identity_metric(k)?;
    let pairs: Vec<_> = (0..n).map(|i| (1 + i, 1 + n + i)).collect();
    let s = lie_structure(spec, paired_phi(m, &pairs), unit(m, 0), unit(m, 0))?;
    let l2 = lambda * lambda;
    let kappa = -1.0 - l2;
    let published = Origin::Published;
    let divided = (n >= 2).then(|| {
        exp(
            Coefficients::divided([-1.0, 0.0, l2, 0.0, 0.0, -1.0, 0.0, 1.0, -1.0]),
            published,
        )
    });
    let undivided = (n == 1).then(|| {
        exp(
            vec![-1.0 + l2, 0.0, 2.0 * l2, 0.0, 0.0, 0.0, 2.0, 0.0],
            published,
        )
    });
    let expected = ExpectedValues {
        class: exp(StructureTag::AlmostKenmotsu, Origin::HandDerived),
        alpha: 1.0,
        kmn: exp([kappa, 0.0, 2.0], published),
        lambda: exp(lambda, Origin::HandDerived),
        divided,
        undivided,
        sectional: None,
    };
    Ok((s, expected))
}
