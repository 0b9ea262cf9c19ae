//! Certified solvers for the four ℓ1 recovery programs.
//!
//! * Lasso: `min λ‖x‖₁ + ½‖Ax − b‖₂²`, monotone accelerated proximal gradient.
//! * BP: `min ‖x‖₁ s.t. Ax = b`.
//! * QCBP: `min ‖x‖₁ s.t. ‖b − Ax‖₂ ≤ η`.
//! * Dantzig selector: `min ‖x‖₁ s.t. ‖A*(b − Ax)‖∞ ≤ η`.
//!
//! BP, QCBP and the Dantzig selector run a primal–dual hybrid gradient
//! iteration on their saddle-point forms, restarted adaptively from the
//! better of the current and averaged iterates. Convergence is declared only on
//! certificates: KKT residuals for the Lasso and a dual-feasible point with a
//! vanishing duality gap for the constrained programs. Every solver
//! periodically tries to polish the iterate by solving the optimality system
//! on its current support; a polished point is accepted only if it passes the
//! same certificate.

mod lasso;
mod primal_dual;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lasso::{lasso_kkt_residual, solve_lasso, solve_lasso_observed};
pub use primal_dual::{solve_bp, solve_dantzig, solve_qcbp};

use crate::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Step 1/L with L from power iteration on AᵀA.
    FixedLipschitz,
    /// Start below the power-iteration estimate and double L until the
    /// sufficient-decrease test passes.
    Backtracking,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Target for the KKT / feasibility / duality-gap residuals.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub step_rule: StepRule,
    /// Initial ratio between the primal–dual step sizes, in (0, 1]; the
    /// constrained solvers rebalance it at every restart.
    pub dual_step_scale: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_iterations: 50_000, step_rule: StepRule::FixedLipschitz, dual_step_scale: 1.0 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(SolveError::InvalidParameter(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(SolveError::InvalidParameter("max_iterations must be at least 1".into()));
        }
        if !(self.dual_step_scale > 0.0 && self.dual_step_scale <= 1.0) {
            return Err(SolveError::InvalidParameter(format!(
                "dual_step_scale must lie in (0,1], got {}",
                self.dual_step_scale
            )));
        }
        Ok(())
    }
}

/// Result of a solve. `converged` implies both residuals are within the
/// configured tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    #[serde(with = "crate::io::vector_serde")]
    pub estimate: Vector,
    pub iterations: usize,
    pub converged: bool,
    /// Constraint violation (0 for the Lasso).
    pub primal_residual: f64,
    /// Worst KKT violation relative to λ (Lasso) or relative duality gap.
    pub optimality_residual: f64,
    pub objective: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("right-hand side is not in the range of A (least-squares residual {residual:.3e})")]
    Infeasible { residual: f64 },
    #[error("not converged after {} iterations (primal {:.3e}, optimality {:.3e})", .0.iterations, .0.primal_residual, .0.optimality_residual)]
    NotConverged(Box<SolveOutcome>),
}

impl SolveError {
    /// Best iterate carried by a `NotConverged` error.
    pub fn outcome(&self) -> Option<&SolveOutcome> {
        match self {
            SolveError::NotConverged(o) => Some(o),
            _ => None,
        }
    }
}

/// Component-wise soft thresholding at level `t`.
pub fn soft_threshold(v: &Vector, t: f64) -> Vector {
    v.map(|x| {
        if x > t {
            x - t
        } else if x < -t {
            x + t
        } else {
            0.0
        }
    })
}

fn check_rhs(m: usize, b: &Vector) -> Result<(), SolveError> {
    if b.len() != m {
        return Err(SolveError::DimensionMismatch { expected: m, got: b.len() });
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(SolveError::InvalidParameter("right-hand side has non-finite entries".into()));
    }
    Ok(())
}

fn finish(outcome: SolveOutcome) -> Result<SolveOutcome, SolveError> {
    if outcome.converged {
        Ok(outcome)
    } else {
        Err(SolveError::NotConverged(Box::new(outcome)))
    }
}
