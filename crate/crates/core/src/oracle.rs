//! Oracle quantities for a signal observed in Gaussian noise of level σ.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::best_s_term;
use crate::linalg::{count_nonzero, norm1};
use crate::Vector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("signal has nonzero entry {0} outside the given support")]
    SupportViolation(usize),
    #[error("sigma must be positive, got {0}")]
    InvalidSigma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseRegime {
    High,
    Low,
    Medium,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleQuantities {
    /// S₀ = {j : |x(j)| ≥ σ}.
    pub s0: Vec<usize>,
    /// K(x_{S₀}, x).
    pub k_value: f64,
    /// Σ_j min{1, x(j)²/σ²}.
    pub tau: f64,
    pub sigma: f64,
    pub s_star: usize,
    pub regime: NoiseRegime,
}

impl OracleQuantities {
    /// All oracle quantities at once. `s_star` defaults to max(1, ‖x‖₀).
    pub fn compute(x: &Vector, sigma: f64, s_star: Option<usize>) -> Result<Self, OracleError> {
        check_sigma(sigma)?;
        let s0 = above_noise_support(x, sigma);
        let k_value = oracle_risk(&restrict(x, &s0), x, sigma)?;
        let s_star = s_star.unwrap_or_else(|| count_nonzero(x).max(1));
        Ok(Self {
            s0,
            k_value,
            tau: effective_dimension(x, sigma),
            sigma,
            s_star,
            regime: noise_regime_classify(x, sigma, s_star),
        })
    }
}

/// Indices with |x(j)| ≥ σ, inclusive at equality.
pub fn above_noise_support(x: &Vector, sigma: f64) -> Vec<usize> {
    (0..x.len()).filter(|&j| x[j].abs() >= sigma).collect()
}

/// K(ξ, x) = σ²‖ξ‖₀ + ‖x − ξ‖₂².
pub fn oracle_risk(xi: &Vector, x: &Vector, sigma: f64) -> Result<f64, OracleError> {
    if xi.len() != x.len() {
        return Err(OracleError::DimensionMismatch(xi.len(), x.len()));
    }
    Ok(sigma * sigma * count_nonzero(xi) as f64 + (x - xi).norm_squared())
}

/// τ = Σ_j min{1, x(j)²/σ²}.
pub fn effective_dimension(x: &Vector, sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    x.iter().map(|v| (v * v / s2).min(1.0)).sum()
}

/// Minimizer of K(·, x): keep x(j) iff x(j)² ≥ σ² (ties kept).
pub fn oracle_minimizer(x: &Vector, sigma: f64) -> Vector {
    restrict(x, &above_noise_support(x, sigma))
}

/// s̄ = max{‖x_{S₀}‖₀, ‖x̄‖₀}.
pub fn high_noise_sparsity(x: &Vector, sigma: f64) -> usize {
    let s0 = above_noise_support(x, sigma);
    let on_s0 = s0.iter().filter(|&&j| x[j] != 0.0).count();
    on_s0.max(count_nonzero(&oracle_minimizer(x, sigma)))
}

/// Noise regime used to route the general oracle inequality:
/// High when K(x_{S₀},x) ≤ σ²‖x_{S*}‖₀, otherwise Low or Medium depending on
/// whether ‖x_{S₀}‖₀ reaches ‖x_{S*}‖₀.
pub fn noise_regime_classify(x: &Vector, sigma: f64, s_star: usize) -> NoiseRegime {
    let s0 = above_noise_support(x, sigma);
    let k = sigma * sigma * s0.iter().filter(|&&j| x[j] != 0.0).count() as f64 + s0_complement_energy(x, &s0);
    let (head, _) = best_s_term(x, s_star);
    let star_count = count_nonzero(&head);
    let s0_count = s0.iter().filter(|&&j| x[j] != 0.0).count();
    if k <= sigma * sigma * star_count as f64 {
        NoiseRegime::High
    } else if s0_count >= star_count {
        NoiseRegime::Low
    } else {
        NoiseRegime::Medium
    }
}

fn s0_complement_energy(x: &Vector, s0: &[usize]) -> f64 {
    let mut inside = vec![false; x.len()];
    for &j in s0 {
        inside[j] = true;
    }
    (0..x.len()).filter(|&j| !inside[j]).map(|j| x[j] * x[j]).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalSplit {
    /// x restricted to S₀.
    #[serde(serialize_with = "crate::io::vector_serde::serialize")]
    pub x1: Vector,
    /// x restricted to S \ S₀.
    #[serde(serialize_with = "crate::io::vector_serde::serialize")]
    pub x2: Vector,
    pub l1_x2: f64,
    pub l2_x2: f64,
    /// ‖x2‖₁ < σ|S \ S₀| (equality allowed only when S \ S₀ is empty).
    pub l1_check: bool,
    /// ‖x2‖₂ ≤ σ√τ.
    pub l2_check: bool,
}

/// Splits x = x_{S₀} + x_{S∖S₀} for a support `S ⊇ supp(x)`.
pub fn split_signal(x: &Vector, sigma: f64, support: &[usize]) -> Result<SignalSplit, OracleError> {
    check_sigma(sigma)?;
    let mut in_s = vec![false; x.len()];
    for &j in support {
        if j >= x.len() {
            return Err(OracleError::DimensionMismatch(j, x.len()));
        }
        in_s[j] = true;
    }
    if let Some(j) = (0..x.len()).find(|&j| x[j] != 0.0 && !in_s[j]) {
        return Err(OracleError::SupportViolation(j));
    }
    let s0 = above_noise_support(x, sigma);
    let x1 = restrict(x, &s0);
    let x2 = x - &x1;
    let rest = (0..x.len()).filter(|&j| in_s[j] && x[j].abs() < sigma).count();
    let l1_x2 = norm1(&x2);
    let l2_x2 = x2.norm();
    let tau = effective_dimension(x, sigma);
    Ok(SignalSplit {
        l1_check: l1_x2 < sigma * rest as f64 || (rest == 0 && l1_x2 == 0.0),
        l2_check: l2_x2 <= sigma * tau.sqrt() * (1.0 + 1e-12),
        x1,
        x2,
        l1_x2,
        l2_x2,
    })
}

/// x restricted to `idx`.
pub fn restrict(x: &Vector, idx: &[usize]) -> Vector {
    let mut out = Vector::zeros(x.len());
    for &j in idx {
        out[j] = x[j];
    }
    out
}

fn check_sigma(sigma: f64) -> Result<(), OracleError> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(OracleError::InvalidSigma(sigma))
    }
}
