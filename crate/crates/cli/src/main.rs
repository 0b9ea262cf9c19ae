use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mip_core::bounds::{self, TheoremId};
use mip_core::harness::{
    run_experiment, verify_bound_suite, verify_property, ExperimentConfig, Property, PropertyParams, Suite,
    DEFAULT_SUITE_SEED,
};
use mip_core::io::{read_matrix, read_vector, write_matrix};
use mip_core::measurement::{GaussianScale, MeasurementMatrix};
use mip_core::solvers::{solve_bp, solve_dantzig, solve_lasso, solve_qcbp, SolveError, SolverConfig};
use mip_core::OracleQuantities;

/// Sparse recovery under mutual incoherence: solvers, bounds and experiments.
#[derive(Parser)]
#[command(name = "mip-recover", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one ℓ1 program and write the estimate as JSON.
    Solve(SolveArgs),
    /// Evaluate a closed-form bound, or sweep one parameter with --table.
    Bound(BoundArgs),
    /// Oracle risk, effective dimension and noise regime of a signal.
    Oracle(OracleArgs),
    /// Sample a structural property and count violations.
    Verify(VerifyArgs),
    /// Run a Monte-Carlo experiment from a JSON config.
    Experiment(ExperimentArgs),
    /// Run a named verification bundle.
    VerifySuite(SuiteArgs),
    /// Write a measurement matrix from one of the built-in ensembles.
    Ensemble(EnsembleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Bp,
    Qcbp,
    Ds,
    Lasso,
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Matrix file (CSV with `m,n` header, or binary).
    #[arg(long)]
    matrix: PathBuf,
    /// Right-hand side vector file.
    #[arg(long)]
    rhs: PathBuf,
    #[arg(long, conflicts_with = "lambda")]
    eta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long = "max-iter", default_value_t = 50_000)]
    max_iter: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BoundArgs {
    /// Theorem id, e.g. T2_1_lasso.
    #[arg(long)]
    theorem: TheoremId,
    /// Comma-separated `name=value` pairs.
    #[arg(long, default_value = "")]
    params: String,
    /// Sweep `name=start:end:count` and print CSV.
    #[arg(long)]
    table: Option<String>,
}

#[derive(clap::Args)]
struct OracleArgs {
    #[arg(long)]
    signal: PathBuf,
    #[arg(long)]
    sigma: f64,
    #[arg(long = "s-star")]
    s_star: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleKind {
    IdentityHadamard,
    Gaussian,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    NormalizeColumns,
    RawOverSqrtM,
}

impl From<ScaleArg> for GaussianScale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::NormalizeColumns => GaussianScale::NormalizeColumns,
            ScaleArg::RawOverSqrtM => GaussianScale::RawOverSqrtM,
        }
    }
}

#[derive(clap::Args)]
struct MatrixSource {
    /// Matrix file.
    #[arg(long, conflicts_with = "ensemble")]
    matrix: Option<PathBuf>,
    /// Built-in ensemble instead of a file.
    #[arg(long, value_enum)]
    ensemble: Option<EnsembleKind>,
    #[arg(long, default_value_t = 64)]
    m: usize,
    /// Columns (Gaussian only; identity–Hadamard is m×2m).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value = "normalize-columns")]
    scale: ScaleArg,
    /// Seed of the Gaussian draw.
    #[arg(long = "matrix-seed", default_value_t = 0)]
    matrix_seed: u64,
}

impl MatrixSource {
    fn load(&self) -> Result<Option<MeasurementMatrix>> {
        if let Some(path) = &self.matrix {
            let a = read_matrix(path)?;
            return Ok(Some(MeasurementMatrix::from_entries(a)?));
        }
        let Some(kind) = self.ensemble else { return Ok(None) };
        Ok(Some(build_ensemble(kind, self.m, self.n, self.scale, self.matrix_seed)?))
    }
}

fn build_ensemble(
    kind: EnsembleKind,
    m: usize,
    n: Option<usize>,
    scale: ScaleArg,
    seed: u64,
) -> Result<MeasurementMatrix> {
    Ok(match kind {
        EnsembleKind::IdentityHadamard => {
            if n.is_some_and(|n| n != 2 * m) {
                bail!("identity-hadamard is m×2m; drop --n or pass --n {}", 2 * m);
            }
            MeasurementMatrix::identity_hadamard(m)?
        }
        EnsembleKind::Gaussian => {
            let n = n.context("--n is required for the gaussian ensemble")?;
            MeasurementMatrix::gaussian_ensemble(m, n, seed, scale.into())?
        }
    })
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_property)]
    property: Property,
    #[command(flatten)]
    source: MatrixSource,
    /// Comma-separated `name=value` pairs (iota, s, sigma, lambda, eta, kappa, n, threshold).
    #[arg(long, default_value = "")]
    params: String,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_property(s: &str) -> Result<Property, String> {
    s.parse().map_err(|e: mip_core::harness::SuiteError| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: mip_core::harness::SuiteError| e.to_string())
}

#[derive(clap::Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long = "out-dir")]
    out_dir: PathBuf,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(clap::Args)]
struct SuiteArgs {
    #[arg(value_parser = parse_suite)]
    name: Suite,
    #[arg(long, default_value_t = DEFAULT_SUITE_SEED)]
    seed: u64,
}

#[derive(clap::Args)]
struct EnsembleArgs {
    #[arg(long, value_enum)]
    kind: EnsembleKind,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value = "normalize-columns")]
    scale: ScaleArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `.bin` selects the binary format, anything else CSV.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` means the command ran but reported failures.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve(a) => solve(a),
        Command::Bound(a) => bound(a),
        Command::Oracle(a) => {
            let x = read_vector(&a.signal)?;
            let q = OracleQuantities::compute(&x, a.sigma, a.s_star)?;
            print_json(&q)?;
            Ok(true)
        }
        Command::Verify(a) => {
            let matrix = a.source.load()?;
            let params = PropertyParams::from_map(&parse_params(&a.params)?)?;
            let report = verify_property(a.property, matrix.as_ref(), &params, a.samples, a.seed)?;
            print_json(&report)?;
            Ok(report.failures == 0)
        }
        Command::Experiment(a) => {
            let config = ExperimentConfig::from_path(&a.config)?.with_env_overrides()?;
            let report = run_experiment(&config, a.workers)?;
            report.write(&a.out_dir).with_context(|| format!("writing results to {}", a.out_dir.display()))?;
            for f in &report.summary.failures {
                eprintln!("FAIL {f}");
            }
            Ok(report.summary.passed)
        }
        Command::VerifySuite(a) => {
            let report = verify_bound_suite(a.name, a.seed)?;
            for x in &report.assertions {
                eprintln!("{} {}: {}", if x.passed { "PASS" } else { "FAIL" }, x.name, x.detail);
            }
            print_json(&report)?;
            Ok(report.passed)
        }
        Command::Ensemble(a) => {
            let m = build_ensemble(a.kind, a.m, a.n, a.scale, a.seed)?;
            write_matrix(&a.out, m.entries())?;
            Ok(true)
        }
    }
}

fn solve(a: SolveArgs) -> Result<bool> {
    let m = MeasurementMatrix::from_entries(read_matrix(&a.matrix)?)?;
    let b = read_vector(&a.rhs)?;
    let cfg = SolverConfig { tolerance: a.tol, max_iterations: a.max_iter, ..SolverConfig::default() };
    let level = |name: &str, v: Option<f64>| v.with_context(|| format!("--{name} is required for this model"));
    let result = match a.model {
        ModelArg::Bp => {
            if a.eta.is_some() || a.lambda.is_some() {
                bail!("bp takes neither --eta nor --lambda");
            }
            solve_bp(&m, &b, &cfg)
        }
        ModelArg::Qcbp => solve_qcbp(&m, &b, level("eta", a.eta)?, &cfg),
        ModelArg::Ds => solve_dantzig(&m, &b, level("eta", a.eta)?, &cfg),
        ModelArg::Lasso => solve_lasso(&m, &b, level("lambda", a.lambda)?, &cfg),
    };
    let (outcome, ok) = match result {
        Ok(o) => (o, true),
        Err(SolveError::NotConverged(o)) => {
            eprintln!("warning: solver stopped after {} iterations without a certificate", o.iterations);
            (*o, false)
        }
        Err(e) => return Err(e.into()),
    };
    let text = serde_json::to_string_pretty(&outcome)?;
    match &a.out {
        Some(path) => write_file(path, &text)?,
        None => println!("{text}"),
    }
    Ok(ok)
}

fn bound(a: BoundArgs) -> Result<bool> {
    let mut params = parse_params(&a.params)?;
    let Some(table) = a.table else {
        print_json(&bounds::evaluate(a.theorem, &params)?)?;
        return Ok(true);
    };
    let (name, values) = parse_sweep(&table)?;
    let mut out = String::from("param,value,applicable\n");
    for v in values {
        params.insert(name.clone(), v);
        let r = bounds::evaluate(a.theorem, &params)?;
        let value = r.value.map(|x| format!("{x:?}")).unwrap_or_default();
        out.push_str(&format!("{v:?},{value},{}\n", r.applicable));
    }
    std::io::stdout().write_all(out.as_bytes())?;
    Ok(true)
}

/// `a=1,b=2.5` into a map; empty input gives an empty map.
fn parse_params(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    for pair in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = pair.split_once('=').with_context(|| format!("expected name=value, got `{pair}`"))?;
        let v: f64 = v.trim().parse().with_context(|| format!("parameter `{k}`: `{v}` is not a number"))?;
        if map.insert(k.trim().to_string(), v).is_some() {
            bail!("parameter `{k}` given twice");
        }
    }
    Ok(map)
}

/// `name=start:end:count`, endpoints inclusive.
fn parse_sweep(text: &str) -> Result<(String, Vec<f64>)> {
    let (name, range) = text.split_once('=').context("--table expects name=start:end:count")?;
    let parts: Vec<&str> = range.split(':').collect();
    let [start, end, count] = parts[..] else { bail!("--table expects name=start:end:count, got `{text}`") };
    let start: f64 = start.parse().context("table start")?;
    let end: f64 = end.parse().context("table end")?;
    let count: usize = count.parse().context("table count")?;
    if count == 0 {
        bail!("table count must be positive");
    }
    let values = (0..count)
        .map(|i| if count == 1 { start } else { start + (end - start) * i as f64 / (count - 1) as f64 })
        .collect();
    Ok((name.trim().to_string(), values))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_and_sweeps() {
        let p = parse_params("mu=0.125, s=4").unwrap();
        assert_eq!(p["mu"], 0.125);
        assert_eq!(p["s"], 4.0);
        assert!(parse_params("mu").is_err());
        assert!(parse_params("s=1,s=2").is_err());
        let (name, v) = parse_sweep("s=1:5:5").unwrap();
        assert_eq!(name, "s");
        assert_eq!(v, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!(parse_sweep("s=1:5").is_err());
    }
}
