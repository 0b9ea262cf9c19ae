use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{CheckId, ConfigError, Ensemble, ExperimentConfig, LevelRule, Model, SignalModel};
use super::experiment::{event_frequency, run_experiment, ExperimentSummary};
use crate::bounds::{minimax_trace_floor, sqrt_two_log, TraceError};
use crate::geometry::{
    cone_constraint_check_ds, cone_constraint_check_lasso, gaussian_lq_threshold, lq_ratio, polytope_decompose,
    polytope_membership, rnsp_check, rnsp_constants, RnspBound,
};
use crate::linalg::{count_nonzero, norm1, norm_inf};
use crate::measurement::{GaussianScale, MatrixError, MeasurementMatrix};
use crate::solvers::{solve_dantzig, solve_lasso, SolverConfig};
use crate::{rng, Matrix, Vector};

pub const DEFAULT_SUITE_SEED: u64 = 2024;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("parameter `{0}`: {1}")]
    Param(&'static str, String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Stable,
    GaussianSparse,
    OracleSparse,
    OracleGeneral,
    MinimaxChain,
    Rnsp,
    Lq,
    Cone,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Stable,
        Suite::GaussianSparse,
        Suite::OracleSparse,
        Suite::OracleGeneral,
        Suite::MinimaxChain,
        Suite::Rnsp,
        Suite::Lq,
        Suite::Cone,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Stable => "stable",
            Suite::GaussianSparse => "gaussian_sparse",
            Suite::OracleSparse => "oracle_sparse",
            Suite::OracleGeneral => "oracle_general",
            Suite::MinimaxChain => "minimax_chain",
            Suite::Rnsp => "rnsp",
            Suite::Lq => "lq",
            Suite::Cone => "cone",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = SuiteError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| SuiteError::Unknown { kind: "suite", name: s.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
}

impl SuiteReport {
    fn new(suite: Suite, seed: u64, assertions: Vec<Assertion>) -> Self {
        Self { suite, seed, passed: assertions.iter().all(|a| a.passed), assertions }
    }
}

fn assertion(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Assertion {
    Assertion { name: name.into(), passed, detail: detail.into() }
}

/// Runs a named bundle of checks with its default configuration.
pub fn verify_bound_suite(suite: Suite, seed: u64) -> Result<SuiteReport, SuiteError> {
    let assertions = match suite {
        Suite::Stable => stable_suite(seed)?,
        Suite::GaussianSparse => gaussian_sparse_suite(seed)?,
        Suite::OracleSparse => oracle_sparse_suite(seed)?,
        Suite::OracleGeneral => oracle_general_suite(seed)?,
        Suite::MinimaxChain => minimax_chain_suite(seed)?,
        Suite::Rnsp => {
            let m = MeasurementMatrix::identity_hadamard(64)?;
            let params = PropertyParams { iota: Some(1.5), s: Some(3), ..Default::default() };
            vec![property_assertion(verify_property(Property::Rnsp, Some(&m), &params, 10_000, seed)?)]
        }
        Suite::Lq => {
            let m = MeasurementMatrix::gaussian_ensemble(32, 64, seed, GaussianScale::RawOverSqrtM)?;
            vec![property_assertion(verify_property(Property::Lq, Some(&m), &PropertyParams::default(), 100, seed)?)]
        }
        Suite::Cone => {
            let m = MeasurementMatrix::identity_hadamard(64)?;
            let lasso = PropertyParams { sigma: Some(0.05), s: Some(2), ..Default::default() };
            let ds = PropertyParams { sigma: Some(0.05), s: Some(4), ..Default::default() };
            vec![
                property_assertion(verify_property(Property::ConeLasso, Some(&m), &lasso, 250, seed)?),
                property_assertion(verify_property(Property::ConeDs, Some(&m), &ds, 250, seed.wrapping_add(1))?),
            ]
        }
    };
    Ok(SuiteReport::new(suite, seed, assertions))
}

fn property_assertion(r: PropertyReport) -> Assertion {
    assertion(
        format!("{} property", r.property.as_str()),
        r.failures == 0 && r.samples > 0,
        format!("{} samples, {} failures, worst slack {:.3e}", r.samples, r.failures, r.worst_slack),
    )
}

/// Base config: identity–Hadamard 64×128 with Rademacher signals.
pub fn hadamard_config(
    model: Model,
    s: usize,
    sigma: f64,
    level_rule: LevelRule,
    checks: Vec<CheckId>,
    trials: usize,
    seed: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        ensemble: Ensemble::IdentityHadamard,
        matrix_path: None,
        gaussian_scale: GaussianScale::NormalizeColumns,
        resample_matrix: false,
        m: 64,
        n: 128,
        s,
        signal_model: SignalModel::RademacherSupport,
        amplitude: 1.0,
        sigma,
        model,
        level_rule,
        trials,
        master_seed: seed,
        checks,
        solver: SolverConfig::default(),
    }
}

// Zero violations, ≤ 1% solver failures, at least one evaluated trial per
// check, and (for σ > 0) the event-E frequency floor.
fn experiment_assertions(label: &str, cfg: &ExperimentConfig) -> Result<Vec<Assertion>, SuiteError> {
    let report = run_experiment(cfg, 0)?;
    Ok(summary_assertions(label, &report.summary))
}

fn summary_assertions(label: &str, s: &ExperimentSummary) -> Vec<Assertion> {
    let mut out = Vec::new();
    for (check, c) in &s.checks {
        out.push(assertion(
            format!("{label}: {}", check.as_str()),
            c.failed == 0 && c.evaluated > 0,
            format!(
                "{} evaluated ({:.1}% conditioning), {} violations",
                c.evaluated,
                100.0 * c.conditioning_rate,
                c.failed
            ),
        ));
    }
    out.push(assertion(
        format!("{label}: solver failures"),
        s.solver_failure_rate <= super::experiment::MAX_SOLVER_FAILURE_RATE,
        format!("{} of {} solves did not converge", s.solver_failures, s.trials),
    ));
    out
}

fn stable_suite(seed: u64) -> Result<Vec<Assertion>, SuiteError> {
    let mut out = experiment_assertions(
        "lasso s=1",
        &hadamard_config(
            Model::Lasso,
            1,
            0.05,
            LevelRule::LambdaEventTimes(2.0),
            vec![CheckId::StableBound],
            500,
            seed,
        ),
    )?;
    out.extend(experiment_assertions(
        "ds s=4",
        &hadamard_config(Model::Ds, 4, 0.05, LevelRule::LambdaEventTimes(1.0), vec![CheckId::StableBound], 500, seed),
    )?);
    out.extend(experiment_assertions(
        "qcbp s=4",
        &hadamard_config(Model::Qcbp, 4, 0.05, LevelRule::L2NoiseBall, vec![CheckId::StableBound], 500, seed),
    )?);
    Ok(out)
}

/// Frequency of ‖A*z‖∞ ≤ σ√(2 ln n) over `draws` Gaussian noise vectors.
pub fn event_e_frequency(
    m: &MeasurementMatrix,
    sigma: f64,
    draws: usize,
    seed: u64,
) -> super::experiment::EventFrequency {
    let level = sigma * sqrt_two_log(m.n());
    let hits = (0..draws as u64)
        .filter(|&k| {
            let z = rng::gaussian_vector(&mut rng::stream(seed, k), m.m(), sigma);
            norm_inf(&(m.entries().transpose() * z)) <= level
        })
        .count();
    event_frequency(hits, draws, m.n())
}

fn gaussian_sparse_suite(seed: u64) -> Result<Vec<Assertion>, SuiteError> {
    let m = MeasurementMatrix::identity_hadamard(64)?;
    let f = event_e_frequency(&m, 1.0, 2000, seed);
    let mut out = vec![assertion(
        "event E frequency",
        f.holds,
        format!("rate {:.4} vs floor {:.5} − 3 sd = {:.4}", f.rate, f.floor, f.threshold),
    )];
    out.extend(experiment_assertions(
        "ds s=4",
        &hadamard_config(
            Model::Ds,
            4,
            0.05,
            LevelRule::LambdaEventTimes(1.0),
            vec![CheckId::GaussianSparseBound],
            300,
            seed,
        ),
    )?);
    out.extend(experiment_assertions(
        "lasso s=1",
        &hadamard_config(
            Model::Lasso,
            1,
            0.05,
            LevelRule::LambdaEventTimes(2.0),
            vec![CheckId::GaussianSparseBound],
            300,
            seed,
        ),
    )?);
    Ok(out)
}

fn oracle_sparse_suite(seed: u64) -> Result<Vec<Assertion>, SuiteError> {
    // entries straddle σ so the oracle risk mixes both branches of min{σ², x²}
    let mut ds = hadamard_config(
        Model::Ds,
        4,
        0.05,
        LevelRule::EtaStar,
        vec![CheckId::OracleSparse, CheckId::OracleHighNoise],
        300,
        seed,
    );
    ds.signal_model = SignalModel::GaussianSupport;
    ds.amplitude = 0.1;
    let mut lasso = hadamard_config(
        Model::Lasso,
        1,
        0.05,
        LevelRule::LambdaStar,
        vec![CheckId::OracleSparse, CheckId::OracleHighNoise],
        300,
        seed,
    );
    lasso.signal_model = SignalModel::GaussianSupport;
    lasso.amplitude = 0.1;
    let mut out = experiment_assertions("ds s=4", &ds)?;
    out.extend(experiment_assertions("lasso s=1", &lasso)?);
    Ok(out)
}

fn oracle_general_suite(seed: u64) -> Result<Vec<Assertion>, SuiteError> {
    // Ingredient 1: high-noise bound for dense power-law signals on an MIP
    // ensemble (few entries above σ keep s̄ within the coherence condition).
    let mut ds = hadamard_config(Model::Ds, 0, 0.05, LevelRule::EtaStar, vec![CheckId::OracleHighNoise], 200, seed);
    ds.signal_model = SignalModel::PowerDecay { exponent: 1.0 };
    ds.amplitude = 0.2;
    let mut lasso =
        hadamard_config(Model::Lasso, 0, 0.05, LevelRule::LambdaStar, vec![CheckId::OracleHighNoise], 200, seed);
    lasso.signal_model = SignalModel::PowerDecay { exponent: 2.0 };
    lasso.amplitude = 0.08;
    let mut out = experiment_assertions("ds power-law", &ds)?;
    out.extend(experiment_assertions("lasso power-law", &lasso)?);
    // Ingredient 2: the quotient property of Gaussian designs.
    let g = MeasurementMatrix::gaussian_ensemble(32, 64, seed, GaussianScale::RawOverSqrtM)?;
    out.push(property_assertion(verify_property(Property::Lq, Some(&g), &PropertyParams::default(), 100, seed)?));
    Ok(out)
}

fn minimax_chain_suite(seed: u64) -> Result<Vec<Assertion>, SuiteError> {
    let (violations, worst) = minimax_chain_sample(40, 80, 100, seed)?;
    let mut out = vec![assertion(
        "random 40x80 supports",
        violations == 0,
        format!("100 supports, {violations} violations, worst relative slack {worst:.3e}"),
    )];
    let h = MeasurementMatrix::identity_hadamard(64)?;
    let mu = h.coherence()?;
    let mut rng = rng::stream(seed, 1);
    let mut bad = 0;
    for _ in 0..100 {
        let support = sample(&mut rng, 128, 4).into_vec();
        let t = minimax_trace_floor(&h, &support, 1.0).map_err(trace_err)?;
        if t.trace_value < t.closed_form * (1.0 - 1e-12) || t.max_eig > 1.0 + 3.0 * mu + 1e-12 {
            bad += 1;
        }
    }
    out.push(assertion("identity-hadamard s=4 supports", bad == 0, format!("100 supports, {bad} violations")));
    Ok(out)
}

fn trace_err(e: TraceError) -> SuiteError {
    SuiteError::NotApplicable(e.to_string())
}

/// σ²·tr((A_SᵀA_S)⁻¹) ≥ sσ²/(1+(s−1)μ) and λ_max ≤ 1+(s−1)μ on `count`
/// random supports, each on a fresh normalized Gaussian m×n matrix with
/// s uniform in 2..=6. Returns (violations, worst relative slack).
pub fn minimax_chain_sample(m: usize, n: usize, count: usize, seed: u64) -> Result<(usize, f64), SuiteError> {
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for k in 0..count as u64 {
        let mut rng = rng::stream(seed, k);
        let a = MeasurementMatrix::gaussian_ensemble(m, n, rng.random(), GaussianScale::NormalizeColumns)?;
        let mu = a.coherence()?;
        let s = rng.random_range(2..=6usize);
        let support = sample(&mut rng, n, s).into_vec();
        let sigma = rng.random_range(0.1..2.0);
        let t = minimax_trace_floor(&a, &support, sigma).map_err(trace_err)?;
        let spread = 1.0 + (s as f64 - 1.0) * mu;
        let slack = ((t.trace_value - t.closed_form) / t.closed_form).min((spread - t.max_eig) / spread);
        worst = worst.min(slack);
        if t.trace_value < t.closed_form * (1.0 - 1e-12) || t.max_eig > spread + 1e-12 {
            violations += 1;
        }
    }
    Ok((violations, worst))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Property {
    #[serde(rename = "rnsp")]
    Rnsp,
    #[serde(rename = "lq")]
    Lq,
    #[serde(rename = "cone-lasso")]
    ConeLasso,
    #[serde(rename = "cone-ds")]
    ConeDs,
    #[serde(rename = "polytope")]
    Polytope,
    #[serde(rename = "gram")]
    Gram,
}

impl Property {
    pub const ALL: [Property; 6] =
        [Property::Rnsp, Property::Lq, Property::ConeLasso, Property::ConeDs, Property::Polytope, Property::Gram];

    pub fn as_str(self) -> &'static str {
        match self {
            Property::Rnsp => "rnsp",
            Property::Lq => "lq",
            Property::ConeLasso => "cone-lasso",
            Property::ConeDs => "cone-ds",
            Property::Polytope => "polytope",
            Property::Gram => "gram",
        }
    }
}

impl FromStr for Property {
    type Err = SuiteError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| SuiteError::Unknown { kind: "property", name: s.to_string() })
    }
}

/// Optional parameters of [`verify_property`]; defaults are listed per field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PropertyParams {
    /// rnsp: ι (1.5).
    pub iota: Option<f64>,
    /// rnsp 3, cone-lasso 1, cone-ds 4, polytope 3, gram 3.
    pub s: Option<usize>,
    /// cone: noise level (0.05).
    pub sigma: Option<f64>,
    /// cone-lasso: λ (2σ√(2 ln n)).
    pub lambda: Option<f64>,
    /// cone-ds: η (σ√(2 ln n)).
    pub eta: Option<f64>,
    /// polytope: κ (1).
    pub kappa: Option<f64>,
    /// polytope: dimension when no matrix is given (12).
    pub n: Option<usize>,
    /// lq: ratio threshold (34√s*).
    pub threshold: Option<f64>,
}

impl PropertyParams {
    /// From `name → value` pairs, rejecting unknown names.
    pub fn from_map(map: &BTreeMap<String, f64>) -> Result<Self, SuiteError> {
        let mut p = PropertyParams::default();
        for (k, &v) in map {
            let int = |name: &'static str| {
                if v >= 0.0 && v.fract() == 0.0 {
                    Ok(v as usize)
                } else {
                    Err(SuiteError::Param(name, format!("expected a nonnegative integer, got {v}")))
                }
            };
            match k.as_str() {
                "iota" => p.iota = Some(v),
                "s" => p.s = Some(int("s")?),
                "sigma" => p.sigma = Some(v),
                "lambda" => p.lambda = Some(v),
                "eta" => p.eta = Some(v),
                "kappa" => p.kappa = Some(v),
                "n" => p.n = Some(int("n")?),
                "threshold" => p.threshold = Some(v),
                _ => return Err(SuiteError::Unknown { kind: "parameter", name: k.clone() }),
            }
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: Property,
    pub samples: usize,
    pub failures: usize,
    /// Smallest rhs − lhs over all samples (negative on failure).
    pub worst_slack: f64,
    /// Draws discarded because the property's hypothesis failed (cone only).
    pub rejected_draws: usize,
}

fn need_matrix(m: Option<&MeasurementMatrix>, p: Property) -> Result<&MeasurementMatrix, SuiteError> {
    m.ok_or_else(|| SuiteError::Param("matrix", format!("`{}` needs a measurement matrix", p.as_str())))
}

/// Samples `samples` instances of a structural property and counts
/// violations. Deterministic in `seed`.
pub fn verify_property(
    property: Property,
    matrix: Option<&MeasurementMatrix>,
    params: &PropertyParams,
    samples: usize,
    seed: u64,
) -> Result<PropertyReport, SuiteError> {
    let mut report =
        PropertyReport { property, samples: 0, failures: 0, worst_slack: f64::INFINITY, rejected_draws: 0 };
    let record = |r: &mut PropertyReport, slack: f64, ok: bool| {
        r.samples += 1;
        r.worst_slack = r.worst_slack.min(slack);
        if !ok {
            r.failures += 1;
        }
    };
    match property {
        Property::Rnsp => {
            let m = need_matrix(matrix, property)?;
            let s = params.s.unwrap_or(3);
            let constants = rnsp_constants(m.coherence()?, s, params.iota.unwrap_or(1.5));
            if !constants.applicable {
                return Err(SuiteError::NotApplicable(format!(
                    "μ = {} does not meet the RNSP coherence condition for s = {s}",
                    constants.mu
                )));
            }
            let projector = null_space_projector(m.entries());
            for k in 0..samples as u64 {
                let x = rnsp_sample(k, m.n(), s, &projector, &mut rng::stream(seed, k));
                for bound in [RnspBound::L2, RnspBound::Dantzig] {
                    let c =
                        rnsp_check(m, &x, &constants, bound).map_err(|e| SuiteError::NotApplicable(e.to_string()))?;
                    record(&mut report, c.rhs - c.lhs, c.holds);
                }
            }
            // two inequalities per sample
            report.samples /= 2;
            report.failures = report.failures.min(report.samples);
        }
        Property::Lq => {
            let m = need_matrix(matrix, property)?;
            let threshold = params.threshold.unwrap_or_else(|| gaussian_lq_threshold(m.m(), m.n()));
            let cfg = SolverConfig::default();
            for k in 0..samples as u64 {
                let x = rng::gaussian_vector(&mut rng::stream(seed, k), m.n(), 1.0);
                match lq_ratio(m, &x, &cfg) {
                    Ok(r) => record(&mut report, threshold - r, r <= threshold),
                    Err(_) => record(&mut report, f64::NEG_INFINITY, false),
                }
            }
        }
        Property::ConeLasso | Property::ConeDs => {
            let m = need_matrix(matrix, property)?;
            let lasso = property == Property::ConeLasso;
            let s = params.s.unwrap_or(if lasso { 1 } else { 4 });
            let sigma = params.sigma.unwrap_or(0.05);
            let event = sigma * sqrt_two_log(m.n());
            let level = if lasso { params.lambda.unwrap_or(2.0 * event) } else { params.eta.unwrap_or(event) };
            let hypothesis = if lasso { level / 2.0 } else { level };
            let cfg = SolverConfig::default();
            let mut draw = 0u64;
            while report.samples < samples && draw < 20 * samples as u64 + 20 {
                let mut rng = rng::stream(seed, draw);
                draw += 1;
                let x = sparse_rademacher(&mut rng, m.n(), s);
                let z = rng::gaussian_vector(&mut rng, m.m(), sigma);
                if norm_inf(&(m.entries().transpose() * &z)) > hypothesis {
                    report.rejected_draws += 1;
                    continue;
                }
                let b = m.entries() * &x + z;
                let solved = if lasso { solve_lasso(m, &b, level, &cfg) } else { solve_dantzig(m, &b, level, &cfg) };
                let Ok(out) = solved else {
                    record(&mut report, f64::NEG_INFINITY, false);
                    continue;
                };
                if lasso {
                    let c = cone_constraint_check_lasso(m, &x, &out.estimate, s, level)
                        .map_err(|e| SuiteError::NotApplicable(e.to_string()))?;
                    record(&mut report, c.slack1.min(c.slack2), c.ineq1 && c.ineq2);
                } else {
                    let c = cone_constraint_check_ds(&x, &out.estimate, s)
                        .map_err(|e| SuiteError::NotApplicable(e.to_string()))?;
                    record(&mut report, c.slack, c.holds);
                }
            }
        }
        Property::Polytope => {
            let kappa = params.kappa.unwrap_or(1.0);
            let s = params.s.unwrap_or(3);
            let n = params.n.or(matrix.map(|m| m.n())).unwrap_or(12);
            if kappa.is_nan() || kappa <= 0.0 || s == 0 {
                return Err(SuiteError::Param("kappa", "need κ > 0 and s ≥ 1".into()));
            }
            for k in 0..samples as u64 {
                let x = polytope_sample(&mut rng::stream(seed, k), n, kappa, s);
                let err = match polytope_decompose(&x, kappa, s) {
                    Ok(d) => decomposition_error(&x, kappa, s, &d),
                    Err(_) => f64::INFINITY,
                };
                record(&mut report, 1e-10 - err, err <= 1e-10);
            }
        }
        Property::Gram => {
            let m = need_matrix(matrix, property)?;
            let s = params.s.unwrap_or(3).min(m.n());
            for k in 0..samples as u64 {
                let support = sample(&mut rng::stream(seed, k), m.n(), s).into_vec();
                let g = m.sparse_gram_bounds_check(&support)?;
                record(&mut report, (g.min_eig - g.lower).min(g.upper - g.max_eig), g.holds);
            }
        }
    }
    if report.samples == 0 {
        report.worst_slack = 0.0;
    }
    Ok(report)
}

fn sparse_rademacher(rng: &mut ChaCha20Rng, n: usize, s: usize) -> Vector {
    let mut x = Vector::zeros(n);
    for j in sample(rng, n, s.min(n)) {
        x[j] = if rng.random::<bool>() { 1.0 } else { -1.0 };
    }
    x
}

// I − A⁺A, projecting onto ker A.
fn null_space_projector(a: &Matrix) -> Matrix {
    let n = a.ncols();
    let pinv = a.clone().pseudo_inverse(1e-12).expect("SVD of a finite matrix");
    Matrix::identity(n, n) - pinv * a
}

// Families in rotation: Gaussian, s-sparse spikes plus small Gaussian,
// Gaussian projected onto the null space.
fn rnsp_sample(k: u64, n: usize, s: usize, projector: &Matrix, rng: &mut ChaCha20Rng) -> Vector {
    match k % 3 {
        0 => rng::gaussian_vector(rng, n, 1.0),
        1 => {
            let mut x = rng::gaussian_vector(rng, n, 0.1);
            for j in sample(rng, n, s.min(n)) {
                x[j] += 3.0 * rng::gaussian_vector(rng, 1, 1.0)[0];
            }
            x
        }
        _ => projector * rng::gaussian_vector(rng, n, 1.0),
    }
}

// Random point of T(κ, s): uniform box entries, a random third zeroed,
// scaled into the ℓ1 ball of radius sκ (sometimes onto its boundary).
fn polytope_sample(rng: &mut ChaCha20Rng, n: usize, kappa: f64, s: usize) -> Vector {
    let mut x = Vector::from_iterator(n, (0..n).map(|_| rng.random_range(-kappa..=kappa)));
    for j in 0..n {
        if rng.random_range(0..3) == 0 {
            x[j] = 0.0;
        }
    }
    let budget = s as f64 * kappa;
    let l1 = norm1(&x);
    if l1 > budget {
        let shrink = if rng.random::<bool>() { 1.0 } else { rng.random_range(0.5..1.0) };
        x *= shrink * budget / l1;
    }
    debug_assert!(polytope_membership(&x, kappa, s));
    x
}

/// Worst violation of the decomposition invariants; 0 when all hold
/// exactly, ∞ for a structural failure (sparsity, support, sign, weights).
pub fn decomposition_error(x: &Vector, kappa: f64, s: usize, d: &crate::PolytopeDecomposition) -> f64 {
    if d.count != d.weights.len() || d.count != d.atoms.len() || d.count == 0 {
        return f64::INFINITY;
    }
    if d.weights.iter().any(|&w| w < 0.0) || (d.weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return f64::INFINITY;
    }
    let l1 = norm1(x);
    let mut worst = 0.0f64;
    for u in &d.atoms {
        if count_nonzero(u) > s || (0..x.len()).any(|j| u[j] != 0.0 && x[j] == 0.0) {
            return f64::INFINITY;
        }
        if norm_inf(u) > kappa * (1.0 + 1e-12) {
            return f64::INFINITY;
        }
        worst = worst.max((norm1(u) - l1).abs());
    }
    worst.max(norm_inf(&(d.reconstruct(x.len()) - x)))
}
