//! Almost contact metric structures and their classification.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::geometry::{
    exterior_d, require_spd, Backend, DForm, Field, FieldKind, FormRef, Frame, MetricField,
    OneFormField, Point, TensorField, ThreeForm, VectorField,
};

/// The quadruple `(phi, xi, eta, g)` over a backend.
#[derive(Debug, Clone)]
pub struct AlmostContactStructure {
    backend: Arc<Backend>,
    metric: MetricField,
    phi: TensorField,
    xi: VectorField,
    eta: OneFormField,
}

impl AlmostContactStructure {
    pub fn new(
        backend: Arc<Backend>,
        metric: MetricField,
        phi: TensorField,
        xi: VectorField,
        eta: OneFormField,
    ) -> Result<Self> {
        let dim = backend.dim();
        if dim < 3 || dim % 2 == 0 {
            return Err(GeomError::Usage(format!(
                "dimension must be odd and >= 3, got {dim}"
            )));
        }
        let kinds = [
            (phi.kind(), FieldKind::Endomorphism, "phi"),
            (xi.kind(), FieldKind::Vector, "xi"),
            (eta.kind(), FieldKind::OneForm, "eta"),
        ];
        for (got, want, name) in kinds {
            if got != want {
                return Err(GeomError::Usage(format!(
                    "{name} must be a {want:?} field, got {got:?}"
                )));
            }
        }
        Ok(Self {
            backend,
            metric,
            phi,
            xi,
            eta,
        })
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn backend_arc(&self) -> Arc<Backend> {
        Arc::clone(&self.backend)
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn phi(&self) -> &TensorField {
        &self.phi
    }

    pub fn xi(&self) -> &VectorField {
        &self.xi
    }

    pub fn eta(&self) -> &OneFormField {
        &self.eta
    }

    pub fn dim(&self) -> usize {
        self.backend.dim()
    }

    /// `n` in `dim = 2n + 1`.
    pub fn n(&self) -> usize {
        (self.dim() - 1) / 2
    }

    /// `Phi(X, Y) = g(X, phi Y)` in the backend basis.
    pub fn fundamental_form(&self, p: &Point) -> Result<DMatrix<f64>> {
        self.backend.check_point(p)?;
        Ok(self.metric.eval(p)? * self.phi.eval(p)?)
    }

    pub fn fundamental_form_field(&self) -> TensorField {
        let metric = self.metric.clone();
        let phi = self.phi.clone();
        Field::new(FieldKind::TwoForm, move |p| Ok(metric.eval(p)? * phi.eval(p)?))
    }

    /// Orthonormal frame with `E_0 = xi / |xi|`, completed by Gram–Schmidt on
    /// the backend basis.
    pub fn adapted_frame(&self, p: &Point) -> Result<Frame> {
        self.backend.check_point(p)?;
        let g = self.metric.eval(p)?;
        require_spd(&g)?;
        let m = self.dim();
        let xi = self.xi.eval(p)?;
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(m);
        let mut candidates = vec![xi];
        candidates.extend((0..m).map(|a| {
            let mut e = DVector::zeros(m);
            e[a] = 1.0;
            e
        }));
        for mut v in candidates {
            for b in &basis {
                let c = (b.transpose() * &g * &v)[0];
                v -= b * c;
            }
            let norm = (v.transpose() * &g * &v)[0].sqrt();
            if norm > 1e-8 {
                basis.push(v / norm);
            }
            if basis.len() == m {
                break;
            }
        }
        if basis.len() < m {
            return Err(GeomError::DegenerateFrame { sigma_min: 0.0 });
        }
        Ok(Frame::new(DMatrix::from_columns(&basis), &g))
    }

    /// Structure tensors on a frame at `p`.
    pub fn frame_tensors(&self, p: &Point, frame: &Frame) -> Result<FrameTensors> {
        Ok(FrameTensors {
            phi: frame.endo_in_frame(&self.phi.eval(p)?)?,
            xi: frame.vector_in_frame(&self.xi.eval(p)?)?,
            eta: frame.one_form_in_frame(&self.eta.eval(p)?),
            gram: frame.metric_gram().clone(),
        })
    }

    pub fn validate(&self, points: &[Point]) -> Result<ValidationReport> {
        validate(self, points)
    }

    pub fn classify(&self, points: &[Point], opts: &ClassifyOptions) -> Result<StructureClass> {
        classify(self, points, opts)
    }
}

/// `phi`, `xi`, `eta` and the Gram matrix expressed on one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTensors {
    pub phi: DMatrix<f64>,
    pub xi: DVector<f64>,
    pub eta: DVector<f64>,
    pub gram: DMatrix<f64>,
}

/// Per-axiom maximum residuals over the sample points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub eta_xi: f64,
    pub phi_squared: f64,
    pub compatibility: f64,
    pub phi_xi: f64,
    pub eta_phi: f64,
    pub tol: f64,
    pub passed: bool,
}

impl ValidationReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.eta_xi,
            self.phi_squared,
            self.compatibility,
            self.phi_xi,
            self.eta_phi,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub const AXIOM_TOL: f64 = 1e-8;

pub fn validate(s: &AlmostContactStructure, points: &[Point]) -> Result<ValidationReport> {
    if points.is_empty() {
        return Err(GeomError::Usage("validation needs at least one sample point".into()));
    }
    let m = s.dim();
    let id = DMatrix::<f64>::identity(m, m);
    let mut r = ValidationReport {
        eta_xi: 0.0,
        phi_squared: 0.0,
        compatibility: 0.0,
        phi_xi: 0.0,
        eta_phi: 0.0,
        tol: AXIOM_TOL,
        passed: false,
    };
    for p in points {
        s.backend.check_point(p)?;
        let g = s.metric.eval(p)?;
        require_spd(&g)?;
        let phi = s.phi.eval(p)?;
        let xi = s.xi.eval(p)?;
        let eta = s.eta.eval(p)?;
        let eta_xi = eta.dot(&xi);
        r.eta_xi = r.eta_xi.max((eta_xi - 1.0).abs());
        let sq = &phi * &phi + &id - &xi * eta.transpose();
        r.phi_squared = r.phi_squared.max(sq.amax());
        let compat = phi.transpose() * &g * &phi - &g + &eta * eta.transpose();
        r.compatibility = r.compatibility.max(compat.amax());
        r.phi_xi = r.phi_xi.max((&phi * &xi).amax());
        r.eta_phi = r.eta_phi.max((phi.transpose() * &eta).amax());
    }
    r.passed = r.max_residual() <= r.tol;
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureTag {
    AlmostCosymplectic,
    AlmostKenmotsu,
    AlmostAlphaCosymplectic,
    ContactMetric,
    Unclassified,
}

impl StructureTag {
    pub fn as_str(self) -> &'static str {
        match self {
            StructureTag::AlmostCosymplectic => "almost_cosymplectic",
            StructureTag::AlmostKenmotsu => "almost_kenmotsu",
            StructureTag::AlmostAlphaCosymplectic => "almost_alpha_cosymplectic",
            StructureTag::ContactMetric => "contact_metric",
            StructureTag::Unclassified => "unclassified",
        }
    }

    pub fn in_alpha_family(self) -> bool {
        matches!(
            self,
            StructureTag::AlmostCosymplectic
                | StructureTag::AlmostKenmotsu
                | StructureTag::AlmostAlphaCosymplectic
        )
    }
}

/// Which normalisation of `d eta` matched `d eta = Phi` for a contact metric
/// structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DEtaConvention {
    /// `d eta(X,Y) = X eta(Y) - Y eta(X) - eta([X,Y])`
    Unit,
    /// one half of the above
    Half,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassResiduals {
    pub d_eta: f64,
    pub alpha_fit: Option<f64>,
    pub alpha_raw: Option<f64>,
    pub alpha_spread: Option<f64>,
    pub contact_unit: Option<f64>,
    pub contact_half: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureClass {
    pub tag: StructureTag,
    /// Structure parameter of the alpha family (exactly 0 or 1 for the first
    /// two tags); `None` outside the family.
    pub alpha: Option<f64>,
    pub contact_convention: Option<DEtaConvention>,
    pub residuals: ClassResiduals,
    pub tol: f64,
}

impl StructureClass {
    /// Alpha used by downstream formulas: the family value, or 1 for contact
    /// metric structures (`nabla xi = -phi - phi h`).
    pub fn effective_alpha(&self) -> f64 {
        match self.tag {
            StructureTag::ContactMetric => 1.0,
            _ => self.alpha.unwrap_or(0.0),
        }
    }

    /// Largest residual relevant to the assigned tag. For an unclassified
    /// structure this is the residual of the nearest candidate class.
    pub fn tag_residual(&self) -> f64 {
        let r = &self.residuals;
        let contact = |c: Option<f64>| c.unwrap_or(0.0);
        match (self.tag, r.alpha_fit) {
            (StructureTag::ContactMetric, _) => match self.contact_convention {
                Some(DEtaConvention::Unit) => contact(r.contact_unit),
                _ => contact(r.contact_half),
            },
            (_, Some(fit)) => r.d_eta.max(fit),
            (_, None) => contact(r.contact_unit).min(contact(r.contact_half)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOptions {
    /// Threshold for `d eta = 0`, for the alpha fit residual and for snapping
    /// alpha to 0 or 1.
    pub tol: f64,
    /// Max spread of the per-point alpha before classification fails.
    pub alpha_spread_tol: f64,
    pub random_triples: usize,
    pub seed: u64,
    /// Rotate the non-xi frame vectors at each point by a random orthogonal
    /// matrix drawn from this seed.
    pub rotate_frames: Option<u64>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            alpha_spread_tol: 1e-6,
            random_triples: 10,
            seed: 42,
            rotate_frames: None,
        }
    }
}

struct PointForms {
    d_eta: DMatrix<f64>,
    phi2: DMatrix<f64>,
    d_phi: ThreeForm,
    wedge: ThreeForm,
}

fn point_forms(s: &AlmostContactStructure, p: &Point, frame: &Frame) -> Result<PointForms> {
    let backend = s.backend();
    let DForm::Two(d_eta) = exterior_d(backend, FormRef::One(s.eta()), p)? else {
        unreachable!("d of a 1-form is a 2-form")
    };
    let phi_field = s.fundamental_form_field();
    let DForm::Three(d_phi) = exterior_d(backend, FormRef::Two(&phi_field), p)? else {
        unreachable!("d of a 2-form is a 3-form")
    };
    let phi2 = s.fundamental_form(p)?;
    let eta = s.eta().eval(p)?;
    let wedge = ThreeForm::wedge_one_two(&eta, &phi2);
    let fv = frame.vectors();
    Ok(PointForms {
        d_eta: frame.bilinear_in_frame(&d_eta),
        phi2: frame.bilinear_in_frame(&phi2),
        d_phi: d_phi.in_frame(fv),
        wedge: wedge.in_frame(fv),
    })
}

pub fn classify(
    s: &AlmostContactStructure,
    points: &[Point],
    opts: &ClassifyOptions,
) -> Result<StructureClass> {
    if points.is_empty() {
        return Err(GeomError::Usage("classification needs at least one sample point".into()));
    }
    let m = s.dim();
    let mut rot_rng = opts.rotate_frames.map(ChaCha8Rng::seed_from_u64);
    let mut forms = Vec::with_capacity(points.len());
    for p in points {
        let mut frame = s.adapted_frame(p)?;
        if let Some(rng) = rot_rng.as_mut() {
            frame = frame.rotate_tail(1, rng)?;
        }
        forms.push(point_forms(s, p, &frame)?);
    }
    let d_eta = forms.iter().fold(0.0, |a: f64, f| a.max(f.d_eta.amax()));

    if d_eta <= opts.tol {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut alphas = Vec::with_capacity(points.len());
        let mut triples_per_point = Vec::with_capacity(points.len());
        for f in &forms {
            // frame triples containing xi (= E_0 of the adapted frame) plus random triples
            let mut triples: Vec<(DVector<f64>, DVector<f64>, DVector<f64>)> = Vec::new();
            let unit = |i: usize| {
                let mut e = DVector::zeros(m);
                e[i] = 1.0;
                e
            };
            for j in 1..m {
                for k in (j + 1)..m {
                    triples.push((unit(0), unit(j), unit(k)));
                }
            }
            for _ in 0..opts.random_triples {
                let mut rv = || DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0));
                triples.push((rv(), rv(), rv()));
            }
            let (mut num, mut den) = (0.0, 0.0);
            for (u, v, w) in &triples {
                let a = f.d_phi.eval(u, v, w);
                let b = 2.0 * f.wedge.eval(u, v, w);
                num += a * b;
                den += b * b;
            }
            if den <= f64::EPSILON {
                return Err(GeomError::Structure(
                    "eta ^ Phi vanishes on all probe triples".into(),
                ));
            }
            alphas.push(num / den);
            triples_per_point.push(triples);
        }
        let lo = alphas.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = alphas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let spread = hi - lo;
        if spread > opts.alpha_spread_tol {
            return Err(GeomError::Classification { spread });
        }
        let raw = alphas.iter().sum::<f64>() / alphas.len() as f64;
        let (tag, alpha) = if raw.abs() <= opts.tol {
            (StructureTag::AlmostCosymplectic, 0.0)
        } else if (raw - 1.0).abs() <= opts.tol {
            (StructureTag::AlmostKenmotsu, 1.0)
        } else {
            (StructureTag::AlmostAlphaCosymplectic, raw)
        };
        // residual of dPhi = 2 alpha eta ^ Phi over every frame triple and the probes
        let mut fit_res: f64 = 0.0;
        for (f, triples) in forms.iter().zip(&triples_per_point) {
            let diff = f.d_phi.lin_comb(1.0, &f.wedge, -2.0 * alpha);
            fit_res = fit_res.max(diff.amax());
            for (u, v, w) in triples {
                fit_res = fit_res.max(diff.eval(u, v, w).abs());
            }
        }
        let residuals = ClassResiduals {
            d_eta,
            alpha_fit: Some(fit_res),
            alpha_raw: Some(raw),
            alpha_spread: Some(spread),
            contact_unit: None,
            contact_half: None,
        };
        let tag = if fit_res <= opts.tol {
            tag
        } else {
            StructureTag::Unclassified
        };
        let alpha = tag.in_alpha_family().then_some(alpha);
        return Ok(StructureClass {
            tag,
            alpha,
            contact_convention: None,
            residuals,
            tol: opts.tol,
        });
    }

    let unit = forms
        .iter()
        .fold(0.0, |a: f64, f| a.max((&f.d_eta - &f.phi2).amax()));
    let half = forms
        .iter()
        .fold(0.0, |a: f64, f| a.max((&f.d_eta * 0.5 - &f.phi2).amax()));
    let convention = if unit <= opts.tol {
        Some(DEtaConvention::Unit)
    } else if half <= opts.tol {
        Some(DEtaConvention::Half)
    } else {
        None
    };
    Ok(StructureClass {
        tag: if convention.is_some() {
            StructureTag::ContactMetric
        } else {
            StructureTag::Unclassified
        },
        alpha: None,
        contact_convention: convention,
        residuals: ClassResiduals {
            d_eta,
            alpha_fit: None,
            alpha_raw: None,
            alpha_spread: None,
            contact_unit: Some(unit),
            contact_half: Some(half),
        },
        tol: opts.tol,
    })
}
