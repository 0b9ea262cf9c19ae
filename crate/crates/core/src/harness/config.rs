use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{regularization_levels, sqrt_two_log};
use crate::measurement::GaussianScale;
use crate::solvers::SolverConfig;

/// Environment variable overriding `master_seed`.
pub const SEED_ENV: &str = "MIP_RECOVER_SEED";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("config field `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    Gaussian,
    IdentityHadamard,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalModel {
    /// Uniform random s-subset with ±amplitude entries.
    RademacherSupport,
    /// Uniform random s-subset with amplitude·N(0,1) entries.
    GaussianSupport,
    /// Dense signal with sorted magnitudes amplitude·j^(−exponent), placed
    /// on a random permutation with random signs.
    PowerDecay { exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Bp,
    Qcbp,
    Ds,
    Lasso,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Bp => "bp",
            Model::Qcbp => "qcbp",
            Model::Ds => "ds",
            Model::Lasso => "lasso",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelRule {
    Fixed(f64),
    /// 2σ(5/4 + √(2 ln n)).
    LambdaStar,
    /// σ(3/2 + √(2 ln n)).
    EtaStar,
    /// c·σ√(2 ln n).
    LambdaEventTimes(f64),
    /// σ√(m + 2√(m ln m)), a high-probability bound on ‖z‖₂.
    L2NoiseBall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    /// Noiseless recovery to 1e-6 under μ < 1/(2s−1).
    ExactRecovery,
    /// Deterministic stable-recovery bound, given its noise hypothesis.
    StableBound,
    /// Squared-error bound for s-sparse x under Gaussian noise, on event E.
    GaussianSparseBound,
    /// Sparse oracle inequality at η* / λ*, on event E.
    OracleSparse,
    /// High-noise oracle bound with s̄, on event E.
    OracleHighNoise,
    /// Cone inequalities for h = x̂ − x, given feasibility of x.
    Cone,
    /// σ²·tr((A_SᵀA_S)⁻¹) ≥ sσ²/(1+(s−1)μ) on supp(x).
    MinimaxTrace,
    /// Spectrum of A_SᵀA_S within 1 ± (s−1)μ on supp(x).
    GramBounds,
}

impl CheckId {
    pub const ALL: [CheckId; 8] = [
        CheckId::ExactRecovery,
        CheckId::StableBound,
        CheckId::GaussianSparseBound,
        CheckId::OracleSparse,
        CheckId::OracleHighNoise,
        CheckId::Cone,
        CheckId::MinimaxTrace,
        CheckId::GramBounds,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::ExactRecovery => "exact_recovery",
            CheckId::StableBound => "stable_bound",
            CheckId::GaussianSparseBound => "gaussian_sparse_bound",
            CheckId::OracleSparse => "oracle_sparse",
            CheckId::OracleHighNoise => "oracle_high_noise",
            CheckId::Cone => "cone",
            CheckId::MinimaxTrace => "minimax_trace",
            CheckId::GramBounds => "gram_bounds",
        }
    }
}

fn one() -> f64 {
    1.0
}

/// Declarative description of a Monte-Carlo experiment; mirrors the JSON
/// config file field for field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ensemble: Ensemble,
    /// Matrix file for `ensemble = file` (CSV or MIPMAT01 binary).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_path: Option<PathBuf>,
    #[serde(default = "default_scale")]
    pub gaussian_scale: GaussianScale,
    /// Draw a fresh Gaussian matrix in every trial instead of one per run.
    #[serde(default)]
    pub resample_matrix: bool,
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub signal_model: SignalModel,
    #[serde(default = "one")]
    pub amplitude: f64,
    pub sigma: f64,
    pub model: Model,
    pub level_rule: LevelRule,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub checks: Vec<CheckId>,
    #[serde(default)]
    pub solver: SolverConfig,
}

fn default_scale() -> GaussianScale {
    GaussianScale::NormalizeColumns
}

impl ExperimentConfig {
    /// Parses and validates a JSON config.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; a relative `matrix_path` is resolved against the
    /// file's directory.
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        let mut cfg = Self::from_json(&text)?;
        if let (Some(p), Some(dir)) = (cfg.matrix_path.as_ref(), path.parent()) {
            if p.is_relative() {
                cfg.matrix_path = Some(dir.join(p));
            }
        }
        Ok(cfg)
    }

    /// Applies `MIP_RECOVER_SEED` if set.
    pub fn with_env_overrides(mut self) -> Result<Self, ConfigError> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.master_seed = v
                .trim()
                .parse()
                .map_err(|_| invalid("master_seed", format!("{SEED_ENV}={v} is not an unsigned integer")))?;
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if self.m == 0 || self.n == 0 {
            return Err(invalid("m", "dimensions must be positive"));
        }
        if self.s > self.n {
            return Err(invalid("s", format!("s = {} exceeds n = {}", self.s, self.n)));
        }
        if self.s == 0 && !matches!(self.signal_model, SignalModel::PowerDecay { .. }) {
            return Err(invalid("s", "sparse signal models need s ≥ 1"));
        }
        match self.ensemble {
            Ensemble::IdentityHadamard => {
                if self.n != 2 * self.m {
                    return Err(invalid("n", "identity_hadamard needs n = 2m"));
                }
                if !self.m.is_power_of_two() {
                    return Err(invalid("m", "identity_hadamard needs m a power of two"));
                }
            }
            Ensemble::File if self.matrix_path.is_none() => {
                return Err(invalid("matrix_path", "required when ensemble = file"));
            }
            _ => {}
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(invalid("sigma", "must be finite and nonnegative"));
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(invalid("amplitude", "must be positive"));
        }
        if let SignalModel::PowerDecay { exponent } = self.signal_model {
            if !(exponent > 0.0 && exponent.is_finite()) {
                return Err(invalid("signal_model", "power_decay exponent must be positive"));
            }
        }
        if let LevelRule::Fixed(v) | LevelRule::LambdaEventTimes(v) = self.level_rule {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid("level_rule", "level parameter must be finite and nonnegative"));
            }
        }
        if self.model == Model::Lasso && self.level() <= 0.0 {
            return Err(invalid("level_rule", "the Lasso needs a positive λ (σ = 0 with a σ-scaled rule gives 0)"));
        }
        self.solver.validate().map_err(|e| invalid("solver", e.to_string()))?;
        for (i, c) in self.checks.iter().enumerate() {
            if self.checks[..i].contains(c) {
                return Err(invalid("checks", format!("`{}` listed twice", c.as_str())));
            }
            self.check_compatible(*c)?;
        }
        Ok(())
    }

    // Checks whose theorem fixes the regularization level.
    fn check_compatible(&self, check: CheckId) -> Result<(), ConfigError> {
        let need_sigma = |name: &str| {
            if self.sigma > 0.0 {
                Ok(())
            } else {
                Err(invalid("checks", format!("`{name}` needs sigma > 0")))
            }
        };
        match check {
            CheckId::GaussianSparseBound => {
                need_sigma("gaussian_sparse_bound")?;
                match (self.model, self.level_rule) {
                    (Model::Ds, LevelRule::LambdaEventTimes(1.0)) => Ok(()),
                    (Model::Lasso, LevelRule::LambdaEventTimes(2.0)) => Ok(()),
                    _ => Err(invalid(
                        "checks",
                        "`gaussian_sparse_bound` needs model ds with lambda_event_times 1 or lasso with lambda_event_times 2",
                    )),
                }
            }
            CheckId::OracleSparse | CheckId::OracleHighNoise => {
                need_sigma(check.as_str())?;
                match (self.model, self.level_rule) {
                    (Model::Ds, LevelRule::EtaStar) | (Model::Lasso, LevelRule::LambdaStar) => Ok(()),
                    _ => Err(invalid(
                        "checks",
                        format!("`{}` needs model ds with eta_star or lasso with lambda_star", check.as_str()),
                    )),
                }
            }
            _ => Ok(()),
        }
    }

    /// Regularization level (λ for the Lasso, η otherwise; 0 for BP).
    pub fn level(&self) -> f64 {
        if self.model == Model::Bp {
            return 0.0;
        }
        let levels = regularization_levels(self.sigma, self.n.max(2));
        match self.level_rule {
            LevelRule::Fixed(v) => v,
            LevelRule::LambdaStar => levels.lambda_star,
            LevelRule::EtaStar => levels.eta_star,
            LevelRule::LambdaEventTimes(c) => c * levels.lambda_event,
            LevelRule::L2NoiseBall => {
                let m = self.m as f64;
                self.sigma * (m + 2.0 * (m * m.ln().max(0.0)).sqrt()).sqrt()
            }
        }
    }

    /// σ√(2 ln n), the threshold of event E.
    pub fn event_level(&self) -> f64 {
        self.sigma * sqrt_two_log(self.n.max(2))
    }
}
