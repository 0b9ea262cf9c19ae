//! Closed-form error bounds and oracle inequalities.
//!
//! Every evaluator is a pure function of scalar inputs and reports whether
//! its coherence condition holds instead of failing, so parameter sweeps can
//! tabulate inapplicable regions. All logarithms are natural.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::symmetric_eig_range;
use crate::measurement::{MatrixError, MeasurementMatrix};

/// μ < 1/(2s−1), the BP / QCBP / Dantzig selector condition.
pub fn bp_ds_condition(mu: f64, s: usize) -> bool {
    s >= 1 && mu < 1.0 / (2.0 * s as f64 - 1.0)
}

/// μ < 1/(4s), the Lasso condition.
pub fn lasso_condition(mu: f64, s: usize) -> bool {
    s >= 1 && mu < 1.0 / (4.0 * s as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "T2_1_lasso")]
    T21Lasso,
    #[serde(rename = "T2_2_ds")]
    T22Ds,
    #[serde(rename = "T2_2_qcbp")]
    T22Qcbp,
    #[serde(rename = "P2_1_ds")]
    P21Ds,
    #[serde(rename = "P2_1_lasso")]
    P21Lasso,
    #[serde(rename = "T2_3_minimax_exp")]
    T23MinimaxExp,
    #[serde(rename = "T2_4_minimax_prob")]
    T24MinimaxProb,
    #[serde(rename = "T3_1_oracle_ds")]
    T31OracleDs,
    #[serde(rename = "T3_2_oracle_lasso")]
    T32OracleLasso,
    #[serde(rename = "T3_3_general_ds")]
    T33GeneralDs,
    #[serde(rename = "T3_3_general_lasso")]
    T33GeneralLasso,
    #[serde(rename = "L3_1_high_noise_ds")]
    L31HighNoiseDs,
    #[serde(rename = "L3_1_high_noise_lasso")]
    L31HighNoiseLasso,
    #[serde(rename = "P3_1_low_noise_ds")]
    P31LowNoiseDs,
    #[serde(rename = "P3_1_low_noise_lasso")]
    P31LowNoiseLasso,
}

impl TheoremId {
    pub const ALL: [TheoremId; 15] = [
        TheoremId::T21Lasso,
        TheoremId::T22Ds,
        TheoremId::T22Qcbp,
        TheoremId::P21Ds,
        TheoremId::P21Lasso,
        TheoremId::T23MinimaxExp,
        TheoremId::T24MinimaxProb,
        TheoremId::T31OracleDs,
        TheoremId::T32OracleLasso,
        TheoremId::T33GeneralDs,
        TheoremId::T33GeneralLasso,
        TheoremId::L31HighNoiseDs,
        TheoremId::L31HighNoiseLasso,
        TheoremId::P31LowNoiseDs,
        TheoremId::P31LowNoiseLasso,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T21Lasso => "T2_1_lasso",
            TheoremId::T22Ds => "T2_2_ds",
            TheoremId::T22Qcbp => "T2_2_qcbp",
            TheoremId::P21Ds => "P2_1_ds",
            TheoremId::P21Lasso => "P2_1_lasso",
            TheoremId::T23MinimaxExp => "T2_3_minimax_exp",
            TheoremId::T24MinimaxProb => "T2_4_minimax_prob",
            TheoremId::T31OracleDs => "T3_1_oracle_ds",
            TheoremId::T32OracleLasso => "T3_2_oracle_lasso",
            TheoremId::T33GeneralDs => "T3_3_general_ds",
            TheoremId::T33GeneralLasso => "T3_3_general_lasso",
            TheoremId::L31HighNoiseDs => "L3_1_high_noise_ds",
            TheoremId::L31HighNoiseLasso => "L3_1_high_noise_lasso",
            TheoremId::P31LowNoiseDs => "P3_1_low_noise_ds",
            TheoremId::P31LowNoiseLasso => "P3_1_low_noise_lasso",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = BoundError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| BoundError::UnknownTheorem(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),
    #[error("missing parameter `{0}`")]
    MissingParam(&'static str),
    #[error("parameter `{name}` must be a nonnegative integer, got {value}")]
    NotInteger { name: &'static str, value: f64 },
}

/// An evaluated bound together with its applicability condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem_id: TheoremId,
    /// The bound, present only when `applicable`.
    pub value: Option<f64>,
    /// Probability with which the bound holds, when the statement is
    /// probabilistic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
    pub applicable: bool,
    pub condition_text: String,
    pub inputs: BTreeMap<String, f64>,
}

impl BoundReport {
    fn new(theorem_id: TheoremId, inputs: &[(&str, f64)]) -> Self {
        Self {
            theorem_id,
            value: None,
            probability: None,
            applicable: false,
            condition_text: String::new(),
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    fn holds(mut self, condition: String, value: f64) -> Self {
        self.applicable = true;
        self.condition_text = condition;
        self.value = Some(value);
        self
    }

    fn fails(mut self, condition: String) -> Self {
        self.applicable = false;
        self.condition_text = condition;
        self.value = None;
        self
    }

    fn with_probability(mut self, p: f64) -> Self {
        if self.applicable {
            self.probability = Some(p);
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StableModel {
    Lasso,
    Ds,
    Qcbp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussianModel {
    Ds,
    Lasso,
}

/// `√(2 ln n)`, the Gaussian maximum level.
pub fn sqrt_two_log(n: usize) -> f64 {
    (2.0 * (n as f64).ln()).sqrt()
}

// Applicability of the coherence condition, with the μ = 0 Lasso carve-out.
fn model_condition(lasso: bool, mu: f64, s: usize, s_name: &str) -> Result<String, String> {
    if !(mu.is_finite() && (0.0..1.0).contains(&mu)) {
        return Err(format!("mu must lie in [0,1), got {mu}"));
    }
    if s < 1 {
        return Err(format!("{s_name} must be at least 1"));
    }
    if lasso {
        if mu == 0.0 {
            return Err("bound undefined at μ=0".to_string());
        }
        let text = format!("μ < 1/(4{s_name}) = {}", 1.0 / (4.0 * s as f64));
        if lasso_condition(mu, s) {
            Ok(text)
        } else {
            Err(format!("violated: {text}"))
        }
    } else {
        let text = format!("μ < 1/(2{s_name}−1) = {}", 1.0 / (2.0 * s as f64 - 1.0));
        if bp_ds_condition(mu, s) {
            Ok(text)
        } else {
            Err(format!("violated: {text}"))
        }
    }
}

fn nonneg(name: &str, v: f64) -> Result<(), String> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(format!("{name} must be finite and nonnegative, got {v}"))
    }
}

fn positive(name: &str, v: f64) -> Result<(), String> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(format!("{name} must be finite and positive, got {v}"))
    }
}

fn at_least_two(n: usize) -> Result<(), String> {
    if n >= 2 {
        Ok(())
    } else {
        Err(format!("n must be at least 2, got {n}"))
    }
}

fn finish(report: BoundReport, checks: Result<String, String>, value: impl FnOnce() -> f64) -> BoundReport {
    match checks {
        Ok(text) => report.holds(text, value()),
        Err(text) => report.fails(text),
    }
}

/// Stable recovery error bound on ‖x̂ − x‖₂ for the Lasso (level λ, needs
/// ‖A*z‖∞ ≤ λ/2), the Dantzig selector and QCBP (level η).
pub fn stable_error_bound(model: StableModel, mu: f64, s: usize, level: f64, tail1: f64) -> BoundReport {
    let id = match model {
        StableModel::Lasso => TheoremId::T21Lasso,
        StableModel::Ds => TheoremId::T22Ds,
        StableModel::Qcbp => TheoremId::T22Qcbp,
    };
    let report = BoundReport::new(id, &[("mu", mu), ("s", s as f64), ("level", level), ("tail1", tail1)]);
    let checks = nonneg("level", level)
        .and_then(|_| nonneg("tail1", tail1))
        .and_then(|_| model_condition(model == StableModel::Lasso, mu, s, "s"));
    finish(report, checks, || {
        let sf = s as f64;
        let tail = 2.0 * tail1 / sf.sqrt();
        match model {
            StableModel::Lasso => {
                let d = 1.0 - 4.0 * sf * mu;
                15.0 * sf.sqrt() / (8.0 * mu * d) * level + (2.0 * (1.0 + 2.0 * sf) * mu / d + 0.5) * tail
            }
            StableModel::Ds | StableModel::Qcbp => {
                let d = 1.0 - (2.0 * sf - 1.0) * mu;
                let noise = if model == StableModel::Ds {
                    2.0 * 2f64.sqrt() * sf.sqrt() / d
                } else {
                    2.0 * 2f64.sqrt() * (1.0 + (sf - 1.0) * mu).sqrt() / d
                };
                noise * level + (2f64.sqrt() * sf * mu / d + 1.0 / (2.0 * 2f64.sqrt())) * tail
            }
        }
    })
}

/// P(‖A*z‖∞ ≤ σ√(2 ln n)) ≥ 1 − 1/(2√(π ln n)) for z ~ N(0, σ²I).
pub fn event_probability_floor(n: usize) -> f64 {
    let ln = (n as f64).ln();
    1.0 - 1.0 / (2.0 * (std::f64::consts::PI * ln).sqrt())
}

/// Bound on ‖x̂ − x‖₂² for s-sparse x under Gaussian noise.
pub fn gaussian_sparse_bound(model: GaussianModel, mu: f64, s: usize, sigma: f64, n: usize) -> BoundReport {
    let id = match model {
        GaussianModel::Ds => TheoremId::P21Ds,
        GaussianModel::Lasso => TheoremId::P21Lasso,
    };
    let report = BoundReport::new(id, &[("mu", mu), ("s", s as f64), ("sigma", sigma), ("n", n as f64)]);
    let checks = positive("sigma", sigma)
        .and_then(|_| at_least_two(n))
        .and_then(|_| model_condition(model == GaussianModel::Lasso, mu, s, "s"));
    let sf = s as f64;
    let ln = (n as f64).ln();
    finish(report, checks, || match model {
        GaussianModel::Ds => 16.0 * ln / (1.0 - (2.0 * sf - 1.0) * mu).powi(2) * sf * sigma * sigma,
        GaussianModel::Lasso => 32.0 * ln / (mu * (1.0 - 4.0 * sf * mu)).powi(2) * sf * sigma * sigma,
    })
    .with_probability(event_probability_floor(n))
}

fn minimax_condition(mu: f64, s: usize, sigma: f64) -> Result<String, String> {
    positive("sigma", sigma)?;
    nonneg("mu", mu)?;
    if s < 1 {
        return Err("s must be at least 1".to_string());
    }
    if (s as f64 - 1.0) * mu < 1.0 {
        Ok("(s−1)μ < 1".to_string())
    } else {
        Err("violated: (s−1)μ < 1".to_string())
    }
}

/// Minimax floor sσ²/(1+(s−1)μ) on the expected squared error.
pub fn minimax_expectation_lower(mu: f64, s: usize, sigma: f64) -> BoundReport {
    let report = BoundReport::new(TheoremId::T23MinimaxExp, &[("mu", mu), ("s", s as f64), ("sigma", sigma)]);
    finish(report, minimax_condition(mu, s, sigma), || minimax_closed_form(mu, s, sigma))
}

fn minimax_closed_form(mu: f64, s: usize, sigma: f64) -> f64 {
    let sf = s as f64;
    sf * sigma * sigma / (1.0 + (sf - 1.0) * mu)
}

/// Squared-error threshold nsσ²/(2(1+(s−1)μ)) exceeded with probability at
/// least 1 − e^{−ns/16}.
pub fn minimax_probability_lower(mu: f64, s: usize, sigma: f64, n: usize) -> BoundReport {
    let report =
        BoundReport::new(TheoremId::T24MinimaxProb, &[("mu", mu), ("s", s as f64), ("sigma", sigma), ("n", n as f64)]);
    let checks =
        minimax_condition(mu, s, sigma).and_then(
            |t| {
                if n >= 1 {
                    Ok(t)
                } else {
                    Err("n must be at least 1".to_string())
                }
            },
        );
    let nf = n as f64;
    let sf = s as f64;
    finish(report, checks, || nf * sf * sigma * sigma / (2.0 * (1.0 + (sf - 1.0) * mu)))
        .with_probability(1.0 - (-nf * sf / 16.0).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceFloor {
    /// σ²·trace((A_SᵀA_S)⁻¹).
    pub trace_value: f64,
    /// sσ²/(1+(s−1)μ).
    pub closed_form: f64,
    /// λ_max(A_SᵀA_S).
    pub max_eig: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("Gram submatrix is singular")]
    SingularGram,
}

/// Compares the oracle least-squares risk on support `S` with the
/// closed-form minimax floor.
pub fn minimax_trace_floor(m: &MeasurementMatrix, support: &[usize], sigma: f64) -> Result<TraceFloor, TraceError> {
    let mu = m.coherence()?;
    let gram = m.sparse_gram(support)?;
    let (min_eig, max_eig) = symmetric_eig_range(&gram);
    if min_eig <= 1e-12 {
        return Err(TraceError::SingularGram);
    }
    let inv = gram.try_inverse().ok_or(TraceError::SingularGram)?;
    Ok(TraceFloor {
        trace_value: sigma * sigma * inv.trace(),
        closed_form: minimax_closed_form(mu, support.len(), sigma),
        max_eig,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizationLevels {
    /// 2σ(5/4 + √(2 ln n)).
    pub lambda_star: f64,
    /// σ(3/2 + √(2 ln n)).
    pub eta_star: f64,
    /// σ√(2 ln n).
    pub lambda_event: f64,
}

pub fn regularization_levels(sigma: f64, n: usize) -> RegularizationLevels {
    let root = sqrt_two_log(n);
    RegularizationLevels {
        lambda_star: 2.0 * sigma * (1.25 + root),
        eta_star: sigma * (1.5 + root),
        lambda_event: sigma * root,
    }
}

/// Sparse oracle inequality on ‖x̂ − x‖₂²; `effective_risk` is
/// Σ_j min{σ², x(j)²}.
pub fn oracle_bound_sparse(model: GaussianModel, mu: f64, s: usize, n: usize, effective_risk: f64) -> BoundReport {
    let (id, lasso) = match model {
        GaussianModel::Ds => (TheoremId::T31OracleDs, false),
        GaussianModel::Lasso => (TheoremId::T32OracleLasso, true),
    };
    let report = BoundReport::new(id, &[("mu", mu), ("s", s as f64), ("n", n as f64), ("risk", effective_risk)]);
    let checks =
        nonneg("risk", effective_risk).and_then(|_| at_least_two(n)).and_then(|_| model_condition(lasso, mu, s, "s"));
    finish(report, checks, || oracle_constant(lasso, mu, s, n) * effective_risk)
        .with_probability(event_probability_floor(n))
}

// 8(2+√(2ln n))²/(1−(2s−1)μ)² for DS, 16(2+√(2ln n))²/(μ(1−4sμ))² for Lasso.
fn oracle_constant(lasso: bool, mu: f64, s: usize, n: usize) -> f64 {
    let sf = s as f64;
    let c = (2.0 + sqrt_two_log(n)).powi(2);
    if lasso {
        16.0 * c / (mu * (1.0 - 4.0 * sf * mu)).powi(2)
    } else {
        8.0 * c / (1.0 - (2.0 * sf - 1.0) * mu).powi(2)
    }
}

/// High-noise bound on ‖x̂ − x‖₂² with s̄ = max{‖x_{S₀}‖₀, ‖x̄‖₀}.
pub fn high_noise_bound(model: GaussianModel, mu: f64, s_bar: usize, n: usize, effective_risk: f64) -> BoundReport {
    let (id, lasso) = match model {
        GaussianModel::Ds => (TheoremId::L31HighNoiseDs, false),
        GaussianModel::Lasso => (TheoremId::L31HighNoiseLasso, true),
    };
    let report =
        BoundReport::new(id, &[("mu", mu), ("s_bar", s_bar as f64), ("n", n as f64), ("risk", effective_risk)]);
    let checks = nonneg("risk", effective_risk)
        .and_then(|_| at_least_two(n))
        .and_then(|_| model_condition(lasso, mu, s_bar, "s̄"));
    finish(report, checks, || 2.0 * oracle_constant(lasso, mu, s_bar, n) * effective_risk)
        .with_probability(event_probability_floor(n))
}

/// Ratio shared by the general oracle inequality and the low-noise bound:
/// DS `(138−34(4s*−1)μ)√(1+(s*−1)μ)/(1−(2s*−1)μ)`,
/// Lasso `(2+34μ(4−3(s*−1)μ))√(1+(s*−1)μ)/(μ(1−4s*μ))`.
pub fn low_noise_ratio(lasso: bool, mu: f64, s_star: usize) -> f64 {
    let sf = s_star as f64;
    let spread = (1.0 + (sf - 1.0) * mu).sqrt();
    if lasso {
        (2.0 + 34.0 * mu * (4.0 - 3.0 * (sf - 1.0) * mu)) * spread / (mu * (1.0 - 4.0 * sf * mu))
    } else {
        (138.0 - 34.0 * (4.0 * sf - 1.0) * mu) * spread / (1.0 - (2.0 * sf - 1.0) * mu)
    }
}

/// General (non-sparse) oracle inequality on ‖x̂ − x‖₂² for Gaussian
/// designs. `m`, when given, supplies the probability floor
/// 1 − e^{−m/100} − 1/(2√(π ln n)).
pub fn oracle_bound_general(
    model: GaussianModel,
    mu: f64,
    s_star: usize,
    n: usize,
    head_risk: f64,
    tail2sq: f64,
    m: Option<usize>,
) -> BoundReport {
    let (id, lasso) = match model {
        GaussianModel::Ds => (TheoremId::T33GeneralDs, false),
        GaussianModel::Lasso => (TheoremId::T33GeneralLasso, true),
    };
    let mut inputs =
        vec![("mu", mu), ("s_star", s_star as f64), ("n", n as f64), ("head_risk", head_risk), ("tail2sq", tail2sq)];
    if let Some(m) = m {
        inputs.push(("m", m as f64));
    }
    let report = BoundReport::new(id, &inputs);
    let checks = nonneg("head_risk", head_risk)
        .and_then(|_| nonneg("tail2sq", tail2sq))
        .and_then(|_| at_least_two(n))
        .and_then(|_| model_condition(lasso, mu, s_star, "s*"));
    let root = sqrt_two_log(n);
    let report = finish(report, checks, || {
        let ratio = low_noise_ratio(lasso, mu, s_star);
        let constant = if lasso {
            24.0 * ratio * ratio * (1.25 + root).powi(2)
        } else {
            6.0 * ratio * ratio * (2.0 + root).powi(2)
        };
        constant * (head_risk + tail2sq)
    });
    match m {
        Some(m) => report.with_probability(1.0 - (-(m as f64) / 100.0).exp() - (1.0 - event_probability_floor(n))),
        None => report,
    }
}

/// Low-noise bound on ‖x̂ − x‖₂ (not squared); `level` is λ* for the Lasso
/// and η* for the Dantzig selector, `tail2` is ‖x_{−max(s*)}‖₂.
pub fn low_noise_bound(model: GaussianModel, mu: f64, s_star: usize, level: f64, tail2: f64) -> BoundReport {
    let (id, lasso) = match model {
        GaussianModel::Ds => (TheoremId::P31LowNoiseDs, false),
        GaussianModel::Lasso => (TheoremId::P31LowNoiseLasso, true),
    };
    let report = BoundReport::new(id, &[("mu", mu), ("s_star", s_star as f64), ("level", level), ("tail2", tail2)]);
    let checks = nonneg("level", level)
        .and_then(|_| nonneg("tail2", tail2))
        .and_then(|_| model_condition(lasso, mu, s_star, "s*"));
    finish(report, checks, || low_noise_ratio(lasso, mu, s_star) * ((s_star as f64).sqrt() * level + tail2))
}

/// Evaluates `theorem` from named parameters, as used by the `bound` CLI.
///
/// Parameter names: `mu`, `s` (or `s_star` / `s_bar`), `sigma`, `n`, `m`,
/// `lambda` / `eta` / `level`, `tail1`, `tail2`, `risk`, `head_risk`,
/// `tail2sq`. Tail and risk terms default to zero.
pub fn evaluate(theorem: TheoremId, params: &BTreeMap<String, f64>) -> Result<BoundReport, BoundError> {
    let get = |name: &'static str| params.get(name).copied().ok_or(BoundError::MissingParam(name));
    let opt = |name: &str| params.get(name).copied().unwrap_or(0.0);
    let int = |name: &'static str| -> Result<usize, BoundError> {
        let v = get(name)?;
        if v >= 0.0 && v.fract() == 0.0 && v.is_finite() {
            Ok(v as usize)
        } else {
            Err(BoundError::NotInteger { name, value: v })
        }
    };
    let sparsity = |names: &[&'static str]| -> Result<usize, BoundError> {
        for &name in names {
            if params.contains_key(name) {
                return int(name);
            }
        }
        Err(BoundError::MissingParam(names[0]))
    };
    let level = |primary: &'static str| -> Result<f64, BoundError> {
        params.get(primary).or_else(|| params.get("level")).copied().ok_or(BoundError::MissingParam(primary))
    };
    use GaussianModel as G;
    Ok(match theorem {
        TheoremId::T21Lasso => {
            stable_error_bound(StableModel::Lasso, get("mu")?, sparsity(&["s"])?, level("lambda")?, opt("tail1"))
        }
        TheoremId::T22Ds | TheoremId::T22Qcbp => stable_error_bound(
            if theorem == TheoremId::T22Ds { StableModel::Ds } else { StableModel::Qcbp },
            get("mu")?,
            sparsity(&["s"])?,
            level("eta")?,
            opt("tail1"),
        ),
        TheoremId::P21Ds | TheoremId::P21Lasso => gaussian_sparse_bound(
            if theorem == TheoremId::P21Ds { G::Ds } else { G::Lasso },
            get("mu")?,
            sparsity(&["s"])?,
            get("sigma")?,
            int("n")?,
        ),
        TheoremId::T23MinimaxExp => minimax_expectation_lower(get("mu")?, sparsity(&["s"])?, get("sigma")?),
        TheoremId::T24MinimaxProb => minimax_probability_lower(get("mu")?, sparsity(&["s"])?, get("sigma")?, int("n")?),
        TheoremId::T31OracleDs | TheoremId::T32OracleLasso => oracle_bound_sparse(
            if theorem == TheoremId::T31OracleDs { G::Ds } else { G::Lasso },
            get("mu")?,
            sparsity(&["s"])?,
            int("n")?,
            opt("risk"),
        ),
        TheoremId::T33GeneralDs | TheoremId::T33GeneralLasso => oracle_bound_general(
            if theorem == TheoremId::T33GeneralDs { G::Ds } else { G::Lasso },
            get("mu")?,
            sparsity(&["s_star", "s"])?,
            int("n")?,
            opt("head_risk"),
            opt("tail2sq"),
            if params.contains_key("m") { Some(int("m")?) } else { None },
        ),
        TheoremId::L31HighNoiseDs | TheoremId::L31HighNoiseLasso => high_noise_bound(
            if theorem == TheoremId::L31HighNoiseDs { G::Ds } else { G::Lasso },
            get("mu")?,
            sparsity(&["s_bar", "s"])?,
            int("n")?,
            opt("risk"),
        ),
        TheoremId::P31LowNoiseDs => {
            low_noise_bound(G::Ds, get("mu")?, sparsity(&["s_star", "s"])?, level("eta")?, opt("tail2"))
        }
        TheoremId::P31LowNoiseLasso => {
            low_noise_bound(G::Lasso, get("mu")?, sparsity(&["s_star", "s"])?, level("lambda")?, opt("tail2"))
        }
    })
}
