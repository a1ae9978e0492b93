//! The stages behind each command.
//!
//! Usage, parameter, domain and numeric errors abort the run (exit 1). Any
//! other engine error is a structural failure: it is recorded as a failed
//! check, later stages are skipped and the report is still written.

use acm_core::catalog::{self, ExpectedValues};
use acm_core::decomp::{
    fit, predict_closed_form, verify_dim3_identities, BasisTag, Coefficients, Dim3Form,
    FitSample, PredictInput, DIVIDED, OBSTRUCTION_THRESHOLD, UNDIVIDED,
};
use acm_core::deform::{self, DeformationParams, LawOptions};
use acm_core::geometry::Point;
use acm_core::kmn::{analyze_point, identity_suite, PointAnalysis, SuiteOptions};
use acm_core::structure::{AlmostContactStructure, ClassifyOptions, StructureClass, StructureTag};
use acm_core::{Check, GeomError};
use rayon::prelude::*;

use crate::report::{
    CatalogListing, Coefficient, Decomposition, Dim3Block, Obstruction, PointKmn, Prediction,
    Report, StageFailure, Tolerances,
};
use crate::spec::Loaded;
use crate::CliError;

/// Tolerance of the dimension-3 reconstructions of `R`.
pub const DIM3_FORM_TOL: f64 = 1e-6;
/// Default number of chart sample points.
pub const DEFAULT_POINTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BasisChoice {
    Divided,
    Undivided,
}

impl BasisChoice {
    fn tags(self) -> &'static [BasisTag] {
        match self {
            BasisChoice::Divided => &DIVIDED,
            BasisChoice::Undivided => &UNDIVIDED,
        }
    }

    fn name(self) -> &'static str {
        match self {
            BasisChoice::Divided => "divided",
            BasisChoice::Undivided => "undivided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    Kmn,
    Decompose,
    Deform,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Kmn => "kmn",
            Command::Decompose => "decompose",
            Command::Deform => "deform",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub seed: u64,
    pub points: Option<usize>,
    pub tol: Option<f64>,
    pub basis: BasisChoice,
    pub deformation: Option<DeformationParams>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            points: None,
            tol: None,
            basis: BasisChoice::Divided,
            deformation: None,
        }
    }
}

/// Stops the pipeline: either a hard error or a recorded stage failure.
enum Stop {
    Abort(CliError),
    Stage,
}

impl From<CliError> for Stop {
    fn from(e: CliError) -> Self {
        Stop::Abort(e)
    }
}

fn is_hard(e: &GeomError) -> bool {
    matches!(
        e,
        GeomError::Usage(_)
            | GeomError::Parameter(_)
            | GeomError::Domain { .. }
            | GeomError::Numeric { .. }
    )
}

struct Run<'a> {
    s: &'a AlmostContactStructure,
    expected: Option<&'a ExpectedValues>,
    points: Vec<Point>,
    tol: Tolerances,
    opts: &'a RunOptions,
    report: Report,
}

pub fn run(command: Command, loaded: Loaded, opts: &RunOptions) -> Result<Report, CliError> {
    let tol = Tolerances::resolve(loaded.spec.tolerances.as_ref(), opts.tol);
    if tol.all().iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(CliError::Usage("tolerances must be positive and finite".into()));
    }
    let points = match (&loaded.points, opts.points) {
        (Some(p), None) => p.clone(),
        (_, n) => {
            let n = n.unwrap_or(DEFAULT_POINTS);
            if n == 0 {
                return Err(CliError::Usage("--points must be at least 1".into()));
            }
            catalog::sample_points(loaded.structure.backend(), n, opts.seed)
        }
    };
    if points.is_empty() {
        return Err(CliError::Spec("sample_points is empty".into()));
    }
    for p in &points {
        loaded.structure.backend().check_point(p)?;
    }
    let mut report = Report::new(command.name(), opts.seed);
    report.tolerances = Some(tol);
    report.points = points.iter().map(|p| p.coords().to_vec()).collect();
    report.expected = loaded.expected.clone();
    report.spec = Some(loaded.spec.clone());
    let mut run = Run {
        s: &loaded.structure,
        expected: loaded.expected.as_ref(),
        points,
        tol,
        opts,
        report,
    };
    match run.pipeline(command) {
        Ok(()) | Err(Stop::Stage) => Ok(run.report.finish()),
        Err(Stop::Abort(e)) => Err(e),
    }
}

pub fn catalog_listing() -> Report {
    let mut report = Report::new("catalog", 0);
    report.catalog = Some(CatalogListing {
        entries: catalog::list(),
    });
    report.finish()
}

pub fn catalog_entry(loaded: Loaded) -> Report {
    let mut report = Report::new("catalog", 0);
    let name = loaded.spec.catalog.as_ref().map(|c| c.name.clone());
    report.catalog = Some(CatalogListing {
        entries: catalog::list()
            .into_iter()
            .filter(|e| Some(e.name) == name.as_deref())
            .collect(),
    });
    report.expected = loaded.expected;
    report.spec = Some(loaded.spec);
    report.finish()
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n.max(1) as f64
}

fn coefficient_list(c: &Coefficients) -> Vec<Coefficient> {
    c.tags
        .iter()
        .zip(&c.values)
        .map(|(tag, value)| Coefficient {
            tag: *tag,
            value: *value,
        })
        .collect()
}

/// Divided coefficients in the undivided basis, when `f5,1 = -f5,2`.
fn to_undivided(c: &Coefficients) -> Option<Coefficients> {
    use BasisTag::*;
    let f51 = c.value(R51);
    if (f51 + c.value(R52)).abs() > 1e-12 {
        return None;
    }
    Some(Coefficients::undivided([
        c.value(R1),
        c.value(R2),
        c.value(R3),
        c.value(R4),
        f51,
        c.value(R6),
        c.value(R7),
        c.value(R8),
    ]))
}

impl Run<'_> {
    fn check(&mut self, c: Check) {
        self.report.checks.push(c);
    }

    /// Unwraps a stage result, turning structural errors into a failed
    /// check.
    fn stage<T>(&mut self, name: &str, r: acm_core::Result<T>) -> Result<T, Stop> {
        match r {
            Ok(v) => Ok(v),
            Err(e) if is_hard(&e) => Err(Stop::Abort(e.into())),
            Err(e) => {
                let residual = match &e {
                    GeomError::ModelInconsistency { residual, .. } if residual.is_finite() => {
                        *residual
                    }
                    _ => 1.0,
                };
                self.report.checks.push(Check {
                    passed: false,
                    ..Check::new(format!("{name} completed"), residual, 0.0)
                });
                self.report.failure = Some(StageFailure {
                    stage: name.to_string(),
                    error: e.to_string(),
                });
                Err(Stop::Stage)
            }
        }
    }

    fn pipeline(&mut self, command: Command) -> Result<(), Stop> {
        let class = self.classify()?;
        if command == Command::Classify {
            return Ok(());
        }
        if command == Command::Deform {
            return self.deform();
        }
        let alpha = self.require_alpha_family(&class)?;
        let analyses = self.kmn(alpha)?;
        if command == Command::Kmn {
            return Ok(());
        }
        if command == Command::Verify {
            self.identities(alpha)?;
        }
        self.decompose(&class, alpha, &analyses)?;
        if command == Command::Verify && self.opts.deformation.is_some() {
            self.deform()?;
        }
        Ok(())
    }

    fn classify(&mut self) -> Result<StructureClass, Stop> {
        let validation = self.stage("validation", self.s.validate(&self.points))?;
        let max = validation.max_residual();
        self.report.validation = Some(validation);
        self.check(Check::new("structure satisfies the axioms", max, self.tol.axioms));
        if max > self.tol.axioms {
            self.report.failure = Some(StageFailure {
                stage: "validation".into(),
                error: format!("axiom residual {max:e} exceeds {:e}", self.tol.axioms),
            });
            return Err(Stop::Stage);
        }
        let opts = ClassifyOptions {
            tol: self.tol.classify,
            seed: self.opts.seed,
            ..ClassifyOptions::default()
        };
        let class = self.stage("classification", self.s.classify(&self.points, &opts))?;
        let residual = class.tag_residual();
        self.check(Check::new(
            format!("classified as {}", class.tag.as_str()),
            residual,
            self.tol.classify,
        ));
        if let Some(e) = self.expected {
            let want = e.class.value;
            self.check(Check {
                passed: class.tag == want && residual <= self.tol.classify,
                ..Check::new(
                    format!("class matches the catalog ({})", want.as_str()),
                    residual,
                    self.tol.classify,
                )
            });
        }
        self.report.classification = Some(class.clone());
        Ok(class)
    }

    fn require_alpha_family(&mut self, class: &StructureClass) -> Result<f64, Stop> {
        if class.tag.in_alpha_family() {
            return Ok(class.effective_alpha());
        }
        self.check(Check {
            passed: false,
            ..Check::new("structure is almost alpha-cosymplectic", class.tag_residual(), 0.0)
        });
        self.report.failure = Some(StageFailure {
            stage: "classification".into(),
            error: format!(
                "(kappa, mu, nu) analysis needs an almost alpha-cosymplectic structure, got {}",
                class.tag.as_str()
            ),
        });
        Err(Stop::Stage)
    }

    fn kmn(&mut self, alpha: f64) -> Result<Vec<PointAnalysis>, Stop> {
        let s = self.s;
        let seed = self.opts.seed;
        let analyses: acm_core::Result<Vec<_>> = self
            .points
            .par_iter()
            .map(|p| analyze_point(s, alpha, p, None, seed))
            .collect();
        let analyses = self.stage("kmn extraction", analyses)?;
        let rows: Vec<PointKmn> = analyses
            .iter()
            .map(|pa| {
                let [kappa, mu, nu] = pa.kmn.triple();
                PointKmn {
                    point: pa.curvature.point.coords().to_vec(),
                    kappa,
                    mu,
                    nu,
                    residual: pa.kmn.residual,
                    lambda: pa.kmn.lambda,
                    h_norm: pa.h.norm(),
                    h_vanishes: pa.kmn.h_vanishes,
                    split_width: pa.kmn.split_width,
                    h_residuals: pa.h.residuals.clone(),
                    scalar_curvature: pa.curvature.tau,
                }
            })
            .collect();
        let worst = rows.iter().fold(0.0f64, |a, r| a.max(r.residual));
        self.check(Check::new(
            "R(X,Y)xi has the (kappa, mu, nu) form",
            worst,
            self.tol.kmn,
        ));
        if let Some(e) = self.expected {
            let want = e.kmn.value;
            let diff = rows.iter().fold(0.0f64, |a, r| {
                a.max((r.kappa - want[0]).abs())
                    .max((r.mu - want[1]).abs())
                    .max((r.nu - want[2]).abs())
            });
            self.check(Check::new("(kappa, mu, nu) match the catalog", diff, self.tol.kmn));
            let diff = rows
                .iter()
                .fold(0.0f64, |a, r| a.max((r.lambda - e.lambda.value).abs()));
            self.check(Check::new("eigenvalue of h matches the catalog", diff, self.tol.kmn));
        }
        self.report.kmn = Some(rows);
        Ok(analyses)
    }

    fn identities(&mut self, alpha: f64) -> Result<(), Stop> {
        let opts = SuiteOptions {
            tol: self.tol.identity,
            seed: self.opts.seed,
            ..SuiteOptions::default()
        };
        let report = self.stage(
            "identity suite",
            identity_suite(self.s, alpha, &self.points, &opts),
        )?;
        self.report.checks.extend(report.checks);
        Ok(())
    }

    fn decompose(
        &mut self,
        class: &StructureClass,
        alpha: f64,
        analyses: &[PointAnalysis],
    ) -> Result<(), Stop> {
        let basis = self.opts.basis;
        let samples: Vec<FitSample> = analyses.iter().map(FitSample::from_analysis).collect();
        let f = self.stage("decomposition", fit(&samples, basis.tags()))?;
        self.check(Check::new(
            format!("R is a combination of the {} basis", basis.name()),
            f.residual,
            self.tol.fit_residual,
        ));

        let kappas: Vec<f64> = analyses.iter().map(|a| a.kmn.kappa).collect();
        let kappa = mean(kappas.iter().copied());
        let mu = mean(analyses.iter().map(|a| a.kmn.mu));
        let nu = mean(analyses.iter().map(|a| a.kmn.nu));
        let spread = analyses.iter().fold(0.0f64, |acc, a| {
            acc.max((a.kmn.kappa - kappa).abs())
                .max((a.kmn.mu - mu).abs())
                .max((a.kmn.nu - nu).abs())
        });
        let tau = mean(analyses.iter().map(|a| a.curvature.tau));
        let h_vanishes = analyses.iter().all(|a| a.kmn.h_vanishes);

        let mut kmn_from_writing = None;
        if !f.trivial && f.residual <= self.tol.fit_residual {
            let read = f.coeffs.kmn();
            let diff = read
                .iter()
                .zip([kappa, mu, nu])
                .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            self.check(Check::new(
                "(f1 - f3, f4 - f6, f7 - f8) = (kappa, mu, nu)",
                diff,
                self.tol.fit,
            ));
            kmn_from_writing = Some(read);
        }

        let dim = self.s.dim();
        let mut prediction = None;
        let mut skipped = None;
        let form = match class.tag {
            StructureTag::AlmostCosymplectic | StructureTag::AlmostKenmotsu => {
                if spread > self.tol.kmn {
                    Err("(kappa, mu, nu) vary across the sample points".to_string())
                } else if h_vanishes && dim >= 5 {
                    Err("h = 0: no closed form in dimension at least 5".to_string())
                } else if h_vanishes {
                    Ok(("trans_sasakian", Dim3Form::TransSasakian(tau)))
                } else {
                    Ok(("closed", Dim3Form::Closed))
                }
            }
            other => Err(format!("no closed form for class {}", other.as_str())),
        };
        match form {
            Ok((name, dim3)) => {
                let input = PredictInput {
                    class: class.tag,
                    dim,
                    kappa,
                    mu,
                    nu,
                    dim3,
                };
                let divided = self.stage("closed form", predict_closed_form(&input))?;
                let predicted = match basis {
                    BasisChoice::Divided => Some(divided),
                    BasisChoice::Undivided => to_undivided(&divided),
                };
                match predicted {
                    Some(p) => {
                        let comparison = self.stage("closed form", f.compare(&p))?;
                        self.check(Check::new(
                            "writing matches the closed form",
                            comparison.max_coeff_diff,
                            self.tol.fit,
                        ));
                        prediction = Some(Prediction {
                            form: if dim >= 5 { "general".into() } else { name.into() },
                            coefficients: coefficient_list(&p),
                            comparison,
                        });
                    }
                    None => {
                        skipped = Some(
                            "the closed form needs f5,1 != -f5,2 and has no undivided writing"
                                .to_string(),
                        )
                    }
                }
            }
            Err(reason) => skipped = Some(reason),
        }

        if let Some(e) = self.expected {
            let want = match basis {
                BasisChoice::Divided => e.divided.as_ref().map(|c| c.value.clone()),
                BasisChoice::Undivided => e.undivided.as_ref().and_then(|c| {
                    <[f64; 8]>::try_from(c.value.as_slice())
                        .ok()
                        .map(Coefficients::undivided)
                }),
            };
            if let Some(want) = want {
                let cmp = self.stage("catalog comparison", f.compare(&want))?;
                self.check(Check::new(
                    "writing matches the catalog coefficients",
                    cmp.max_coeff_diff,
                    self.tol.fit,
                ));
            }
        }

        let obstruction = (basis == BasisChoice::Undivided).then_some(Obstruction {
            residual: f.residual,
            threshold: OBSTRUCTION_THRESHOLD,
            obstructed: f.residual > OBSTRUCTION_THRESHOLD,
        });

        if dim == 3 {
            self.dim3_block(alpha, analyses, &samples)?;
        }

        self.report.decomposition = Some(Decomposition {
            basis: basis.name(),
            samples: samples.len(),
            coefficients: coefficient_list(&f.coeffs),
            residual: f.residual,
            abs_residual: f.abs_residual,
            singular_values: f.singular_values.clone(),
            nullspace: f.nullspace.clone(),
            trivial: f.trivial,
            certificate: f.certificate(),
            kmn_from_writing,
            prediction,
            prediction_skipped: skipped,
            obstruction,
        });
        Ok(())
    }

    fn dim3_block(
        &mut self,
        alpha: f64,
        analyses: &[PointAnalysis],
        samples: &[FitSample],
    ) -> Result<(), Stop> {
        let class_tag = if alpha == 0.0 {
            StructureTag::AlmostCosymplectic
        } else {
            StructureTag::AlmostKenmotsu
        };
        let mut block = Dim3Block {
            scalar_curvature: 0.0,
            phi_sectional: 0.0,
            ricci_reconstruction: 0.0,
            tau_form_reconstruction: 0.0,
            phi_sectional_form_reconstruction: 0.0,
        };
        let mut identity_worst: Vec<Check> = Vec::new();
        let mut f_vs_tau = 0.0f64;
        let reconstructable = alpha == 0.0 || (alpha - 1.0).abs() <= 1e-12;
        for (pa, sample) in analyses.iter().zip(samples) {
            let c = &pa.curvature;
            let [kappa, mu, nu] = pa.kmn.triple();
            let f_sec = mean(c.phi_sectional.iter().copied());
            block.scalar_curvature = c.tau;
            block.phi_sectional = f_sec;
            let ricci = self.stage("dimension-3 block", c.dim3_reconstruction())?;
            block.ricci_reconstruction = block
                .ricci_reconstruction
                .max(ricci.lin_comb(1.0, &c.riemann, -1.0).amax());
            f_vs_tau = f_vs_tau.max((f_sec - (0.5 * c.tau - 2.0 * kappa)).abs());
            if reconstructable {
                let input = |dim3| PredictInput {
                    class: class_tag,
                    dim: 3,
                    kappa,
                    mu,
                    nu,
                    dim3,
                };
                for (slot, form) in [
                    (&mut block.tau_form_reconstruction, Dim3Form::Tau(c.tau)),
                    (
                        &mut block.phi_sectional_form_reconstruction,
                        Dim3Form::PhiSectional(f_sec),
                    ),
                ] {
                    let coeffs = predict_closed_form(&input(form)).map_err(|e| Stop::Abort(e.into()))?;
                    let r = sample.basis.combine(&coeffs);
                    *slot = slot.max(r.lin_comb(1.0, &c.riemann, -1.0).amax());
                }
            }
            let checks = self.stage(
                "dimension-3 block",
                verify_dim3_identities(&sample.basis, kappa, alpha),
            )?;
            if identity_worst.is_empty() {
                identity_worst = checks;
            } else {
                for (w, c) in identity_worst.iter_mut().zip(checks) {
                    if c.residual > w.residual || !c.passed {
                        *w = c;
                    }
                }
            }
        }
        self.check(Check::new(
            "R from the Ricci tensor (dimension 3)",
            block.ricci_reconstruction,
            DIM3_FORM_TOL,
        ));
        if reconstructable {
            self.check(Check::new(
                "R from the scalar curvature form (dimension 3)",
                block.tau_form_reconstruction,
                DIM3_FORM_TOL,
            ));
            self.check(Check::new(
                "R from the phi-sectional curvature form (dimension 3)",
                block.phi_sectional_form_reconstruction,
                DIM3_FORM_TOL,
            ));
        }
        self.check(Check::new("F = tau/2 - 2 kappa", f_vs_tau, DIM3_FORM_TOL));
        self.report.checks.extend(identity_worst);
        self.report.dim3 = Some(block);
        Ok(())
    }

    fn deform(&mut self) -> Result<(), Stop> {
        let params = self.opts.deformation.clone().ok_or_else(|| {
            Stop::Abort(CliError::Usage("deform needs --beta".into()))
        })?;
        let opts = LawOptions {
            tol: self.tol.deform,
            seed: self.opts.seed,
            ..LawOptions::default()
        };
        let report = self.stage(
            "deformation",
            deform::verify_laws(self.s, &params, &self.points, &opts),
        )?;
        self.report.checks.extend(report.checks.iter().cloned());
        self.report.deformation = Some(report);
        Ok(())
    }
}
