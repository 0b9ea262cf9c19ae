use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{CheckId, ConfigError, ExperimentConfig};
use super::trial::{CheckOutcome, PreparedExperiment, TrialRecord};
use crate::bounds::event_probability_floor;

/// Largest tolerated fraction of unconverged solves.
pub const MAX_SOLVER_FAILURE_RATE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub evaluated: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// Fraction of trials in which the hypothesis held.
    pub conditioning_rate: f64,
    /// passed / evaluated (1 when nothing was evaluated).
    pub pass_rate: f64,
    /// min / median / max of bound ÷ measured quantity, over passing and
    /// failing trials with a bound value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_to_error: Option<Spread>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q95: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventFrequency {
    pub rate: f64,
    /// 1 − 1/(2√(π ln n)).
    pub floor: f64,
    /// floor − 3·√(floor(1−floor)/trials).
    pub threshold: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub trials: usize,
    pub master_seed: u64,
    pub generator: String,
    /// Coherence of the shared matrix (absent when resampled per trial).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coherence: Option<f64>,
    pub level: f64,
    pub event_e: EventFrequency,
    pub solver_failures: usize,
    pub solver_failure_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_quantiles: Option<Quantiles>,
    pub checks: BTreeMap<CheckId, CheckSummary>,
    pub failures: Vec<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialRecord>,
    pub summary: ExperimentSummary,
}

/// Runs all trials on a pool of `workers` threads (0 = rayon default) and
/// aggregates them in trial order.
pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<ExperimentReport, ConfigError> {
    let prepared = PreparedExperiment::new(config.clone())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| ConfigError::Invalid { field: "workers", message: e.to_string() })?;
    let trials: Vec<TrialRecord> =
        pool.install(|| (0..config.trials as u64).into_par_iter().map(|t| prepared.run_trial(t)).collect());
    let summary = summarize(&prepared, &trials);
    Ok(ExperimentReport { config: config.clone(), trials, summary })
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Empirical frequency against the Gaussian-maximum floor with a three
/// binomial standard deviation allowance.
pub fn event_frequency(hits: usize, draws: usize, n: usize) -> EventFrequency {
    let rate = hits as f64 / draws as f64;
    let floor = event_probability_floor(n.max(2));
    let threshold = floor - 3.0 * (floor * (1.0 - floor) / draws as f64).sqrt();
    EventFrequency { rate, floor, threshold, holds: rate >= threshold }
}

fn summarize(prepared: &PreparedExperiment, trials: &[TrialRecord]) -> ExperimentSummary {
    let cfg = &prepared.config;
    let count = trials.len();
    let events = trials.iter().filter(|t| t.event_e).count();
    let event_e = event_frequency(events, count, cfg.n);
    let solver_failures = trials.iter().filter(|t| !t.solver_converged).count();
    let solver_failure_rate = solver_failures as f64 / count as f64;

    let mut errors: Vec<f64> = trials.iter().filter(|t| t.solver_converged).map(|t| t.error_l2).collect();
    errors.sort_by(f64::total_cmp);
    let error_quantiles = (!errors.is_empty()).then(|| Quantiles {
        min: errors[0],
        q25: quantile(&errors, 0.25),
        median: quantile(&errors, 0.5),
        q75: quantile(&errors, 0.75),
        q95: quantile(&errors, 0.95),
        max: errors[errors.len() - 1],
    });

    let mut checks = BTreeMap::new();
    let mut failures = Vec::new();
    for &check in &cfg.checks {
        let mut s = CheckSummary {
            evaluated: 0,
            passed: 0,
            failed: 0,
            skipped: 0,
            conditioning_rate: 0.0,
            pass_rate: 1.0,
            bound_to_error: None,
        };
        let mut ratios = Vec::new();
        for t in trials {
            match t.checks_passed.get(&check).copied().unwrap_or(CheckOutcome::Skipped) {
                CheckOutcome::Pass => s.passed += 1,
                CheckOutcome::Fail => {
                    s.failed += 1;
                    if failures.len() < 20 {
                        failures.push(format!("trial {}: {} violated", t.trial_index, check.as_str()));
                    }
                }
                CheckOutcome::Skipped => s.skipped += 1,
            }
            if let (Some(&bound), CheckOutcome::Pass | CheckOutcome::Fail) =
                (t.bound_values.get(&check), t.checks_passed[&check])
            {
                let measured = match check {
                    CheckId::GaussianSparseBound | CheckId::OracleSparse | CheckId::OracleHighNoise => {
                        t.error_l2 * t.error_l2
                    }
                    CheckId::StableBound | CheckId::ExactRecovery => t.error_l2,
                    _ => f64::NAN,
                };
                if measured > 0.0 {
                    ratios.push(bound / measured);
                }
            }
        }
        s.evaluated = s.passed + s.failed;
        s.conditioning_rate = s.evaluated as f64 / count as f64;
        if s.evaluated > 0 {
            s.pass_rate = s.passed as f64 / s.evaluated as f64;
        }
        if !ratios.is_empty() {
            ratios.sort_by(f64::total_cmp);
            s.bound_to_error =
                Some(Spread { min: ratios[0], median: quantile(&ratios, 0.5), max: ratios[ratios.len() - 1] });
        }
        if s.failed > 0 {
            failures.push(format!("{}: {} of {} evaluated trials violated", check.as_str(), s.failed, s.evaluated));
        }
        checks.insert(check, s);
    }
    if solver_failure_rate > MAX_SOLVER_FAILURE_RATE {
        failures.push(format!("solver failure rate {solver_failure_rate:.4} exceeds {MAX_SOLVER_FAILURE_RATE}"));
    }
    if cfg.sigma > 0.0 && !event_e.holds {
        failures.push(format!(
            "event E frequency {:.4} below {:.4} (floor {:.5} minus three binomial sd)",
            event_e.rate, event_e.threshold, event_e.floor
        ));
    }
    ExperimentSummary {
        trials: count,
        master_seed: cfg.master_seed,
        generator: crate::rng::GENERATOR.to_string(),
        coherence: prepared.matrix().map(|(_, mu)| mu),
        level: cfg.level(),
        event_e,
        solver_failures,
        solver_failure_rate,
        error_quantiles,
        checks,
        passed: failures.is_empty(),
        failures,
    }
}

fn fmt_f64(v: f64) -> String {
    // shortest representation that round-trips
    format!("{v:?}")
}

impl ExperimentReport {
    /// One row per trial in trial order; check columns follow the config's
    /// check order.
    pub fn trials_csv(&self) -> String {
        let mut out =
            String::from("trial_index,seed,event_e,noise_correlation,noise_l2,error_l2,solver_converged,iterations");
        for c in &self.config.checks {
            let _ = write!(out, ",check_{0},bound_{0}", c.as_str());
        }
        out.push('\n');
        for t in &self.trials {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},{}",
                t.trial_index,
                t.seed,
                t.event_e,
                fmt_f64(t.noise_correlation),
                fmt_f64(t.noise_l2),
                fmt_f64(t.error_l2),
                t.solver_converged,
                t.iterations
            );
            for c in &self.config.checks {
                let outcome = t.checks_passed.get(c).copied().unwrap_or(CheckOutcome::Skipped);
                let bound = t.bound_values.get(c).map(|v| fmt_f64(*v)).unwrap_or_default();
                let _ = write!(out, ",{},{}", outcome.as_str(), bound);
            }
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> String {
        #[derive(Serialize)]
        struct Full<'a> {
            config: &'a ExperimentConfig,
            #[serde(flatten)]
            summary: &'a ExperimentSummary,
        }
        let mut s = serde_json::to_string_pretty(&Full { config: &self.config, summary: &self.summary })
            .expect("summary serializes");
        s.push('\n');
        s
    }

    /// Writes `trials.csv` and `summary.json` into `dir`, creating it.
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("trials.csv"), self.trials_csv())?;
        std::fs::write(dir.join("summary.json"), self.summary_json())
    }
}
