mod expr;
mod json;
mod pipeline;
mod report;
mod spec;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use acm_core::deform::{Beta, DeformationParams};
use acm_core::GeomError;
use clap::{Args, Parser, Subcommand};

use crate::expr::Expr;
use crate::pipeline::{BasisChoice, Command, RunOptions};
use crate::spec::ManifoldSpec;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("spec error: {0}")]
    Spec(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Json(#[from] json::JsonError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Curvature engine for almost contact metric manifolds.
#[derive(Debug, Parser)]
#[command(name = "acm", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Validate the axioms and classify the structure.
    Classify(ModelArgs),
    /// Compute h and extract (kappa, mu, nu) at each sample point.
    Kmn(ModelArgs),
    /// Write R in the R1..R8 tensor basis and compare with the closed forms.
    Decompose(ModelArgs),
    /// Apply a D-homothetic deformation and check its transformation laws.
    Deform(ModelArgs),
    /// Run every stage: classification, h, extraction, identities, writing.
    Verify(ModelArgs),
    /// List the built-in models, or describe one with --catalog.
    Catalog(CatalogArgs),
}

#[derive(Debug, Args)]
struct Source {
    /// JSON manifold specification.
    #[arg(long, conflicts_with = "catalog")]
    spec: Option<PathBuf>,
    /// Built-in model name.
    #[arg(long)]
    catalog: Option<String>,
    /// Model parameter, as name=value (repeatable).
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[command(flatten)]
    source: Source,
    /// Number of chart sample points (Lie models use the identity).
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Override the kmn, identity, fit and deformation tolerances.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "divided")]
    basis: BasisChoice,
    /// Deformation function of the first coordinate t, e.g. "2" or "exp(t)".
    #[arg(long)]
    beta: Option<String>,
    /// Constant factor of the deformed metric on ker(eta).
    #[arg(long = "alpha-d", default_value_t = 1.0)]
    alpha_d: f64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CatalogArgs {
    #[arg(long)]
    catalog: Option<String>,
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    for p in raw {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--param expects name=value, got '{p}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--param {k}: '{v}' is not a number")))?;
        if out.insert(k.trim().to_string(), v).is_some() {
            return Err(CliError::Usage(format!("--param {k} given twice")));
        }
    }
    Ok(out)
}

fn parse_beta(src: &str) -> Result<Beta, CliError> {
    let e = Expr::parse(src).map_err(|e| {
        CliError::Usage(format!("--beta: {} at column {}", e.message, e.column))
    })?;
    Ok(match e.constant_value() {
        Some(v) => Beta::Constant(v),
        None => {
            let label = e.source().to_string();
            Beta::of_t(label, move |t| e.eval(t))
        }
    })
}

fn load(source: &Source) -> Result<spec::Loaded, CliError> {
    let params = parse_params(&source.params)?;
    let spec = match (&source.spec, &source.catalog) {
        (Some(path), None) => {
            let mut spec = ManifoldSpec::from_file(path)?;
            if !params.is_empty() {
                let c = spec.catalog.as_mut().ok_or_else(|| {
                    CliError::Usage("--param applies to catalog models only".into())
                })?;
                c.params.extend(params);
            }
            spec
        }
        (None, Some(name)) => ManifoldSpec::from_catalog(name, params)?,
        _ => return Err(CliError::Usage("give exactly one of --spec or --catalog".into())),
    };
    spec.load()
}

fn emit(report: &report::Report, out: Option<&PathBuf>) -> Result<(), CliError> {
    let text = json::to_string(report)?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let (command, args) = match cli.command {
        Cmd::Catalog(a) => {
            let report = match &a.catalog {
                None if a.params.is_empty() => pipeline::catalog_listing(),
                None => return Err(CliError::Usage("--param needs --catalog".into())),
                Some(name) => {
                    let params = parse_params(&a.params)?;
                    pipeline::catalog_entry(ManifoldSpec::from_catalog(name, params)?.load()?)
                }
            };
            emit(&report, a.out.as_ref())?;
            return Ok(report.passed);
        }
        Cmd::Classify(a) => (Command::Classify, a),
        Cmd::Kmn(a) => (Command::Kmn, a),
        Cmd::Decompose(a) => (Command::Decompose, a),
        Cmd::Deform(a) => (Command::Deform, a),
        Cmd::Verify(a) => (Command::Verify, a),
    };
    if let Some(t) = args.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
        }
    }
    let deformation = match &args.beta {
        Some(b) => Some(DeformationParams::new(args.alpha_d, parse_beta(b)?)),
        None if command == Command::Deform => {
            return Err(CliError::Usage("deform needs --beta".into()))
        }
        None => None,
    };
    let loaded = load(&args.source)?;
    let opts = RunOptions {
        seed: args.seed,
        points: args.points,
        tol: args.tol,
        basis: args.basis,
        deformation,
    };
    let report = pipeline::run(command, loaded, &opts)?;
    emit(&report, args.out.as_ref())?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("acm: {e}");
            ExitCode::from(1)
        }
    }
}
