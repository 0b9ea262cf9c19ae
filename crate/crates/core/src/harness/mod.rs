//! Monte-Carlo experiments and named verification suites.
//!
//! An [`ExperimentConfig`] fixes the ensemble, signal model, noise level,
//! program and regularization rule. Each trial draws `x` and `z` from its own
//! generator stream `(master_seed, trial_index)`, solves, and evaluates the
//! requested checks only when their hypotheses hold in that trial.

mod config;
mod experiment;
mod suites;
mod trial;

pub use config::{CheckId, ConfigError, Ensemble, ExperimentConfig, LevelRule, Model, SignalModel, SEED_ENV};
pub use experiment::{
    event_frequency, run_experiment, CheckSummary, EventFrequency, ExperimentReport, ExperimentSummary, Quantiles,
    Spread, MAX_SOLVER_FAILURE_RATE,
};
pub use suites::{
    decomposition_error, event_e_frequency, hadamard_config, minimax_chain_sample, verify_bound_suite, verify_property,
    Assertion, Property, PropertyParams, PropertyReport, Suite, SuiteError, SuiteReport, DEFAULT_SUITE_SEED,
};
pub use trial::{run_trial, CheckOutcome, PreparedExperiment, TrialRecord};
