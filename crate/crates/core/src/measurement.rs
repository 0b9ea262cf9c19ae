//! Measurement matrices and their incoherence characteristics.

use std::sync::OnceLock;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{bp_ds_condition, lasso_condition};
use crate::linalg::{columns, symmetric_eig_range};
use crate::{rng, Matrix};

/// Columns whose norm is within this distance of one count as normalized.
pub const NORMALIZATION_TOL: f64 = 1e-12;

const ZERO_COLUMN_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("column {0} has zero norm")]
    ZeroColumn(usize),
    #[error("coherence requires l2-normalized columns")]
    NotNormalized,
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("empty support")]
    EmptySupport,
    #[error("support index {index} out of range for {n} columns")]
    IndexOutOfRange { index: usize, n: usize },
}

/// How a Gaussian ensemble is scaled after drawing i.i.d. N(0,1) entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussianScale {
    /// Divide every entry by √m; columns are only approximately unit.
    RawOverSqrtM,
    /// Rescale every column to unit ℓ2 norm.
    NormalizeColumns,
}

/// An m×n real measurement matrix.
///
/// Immutable after construction. The coherence is computed on first request
/// and cached.
#[derive(Debug, Clone)]
pub struct MeasurementMatrix {
    entries: Matrix,
    column_normalized: bool,
    coherence_cache: OnceLock<f64>,
}

impl MeasurementMatrix {
    /// Wraps `entries`, setting the normalization flag iff every column is
    /// already unit within [`NORMALIZATION_TOL`].
    pub fn from_entries(entries: Matrix) -> Result<Self, MatrixError> {
        check_dims(entries.nrows(), entries.ncols())?;
        let column_normalized = entries.column_iter().all(|c| (c.norm() - 1.0).abs() <= NORMALIZATION_TOL);
        Ok(Self { entries, column_normalized, coherence_cache: OnceLock::new() })
    }

    /// Scales every column of `raw` to unit ℓ2 norm.
    pub fn normalize_columns(raw: Matrix) -> Result<Self, MatrixError> {
        check_dims(raw.nrows(), raw.ncols())?;
        let mut entries = raw;
        for (j, mut col) in entries.column_iter_mut().enumerate() {
            let norm = col.norm();
            if norm < ZERO_COLUMN_TOL {
                return Err(MatrixError::ZeroColumn(j));
            }
            col /= norm;
        }
        Ok(Self { entries, column_normalized: true, coherence_cache: OnceLock::new() })
    }

    /// I.i.d. standard normal entries, drawn row by row from [`rng::seeded`].
    pub fn gaussian_ensemble(m: usize, n: usize, seed: u64, scale: GaussianScale) -> Result<Self, MatrixError> {
        check_dims(m, n)?;
        let mut rng = rng::seeded(seed);
        let mut raw = Matrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                raw[(i, j)] = StandardNormal.sample(&mut rng);
            }
        }
        match scale {
            GaussianScale::NormalizeColumns => Self::normalize_columns(raw),
            GaussianScale::RawOverSqrtM => {
                raw /= (m as f64).sqrt();
                Ok(Self { entries: raw, column_normalized: false, coherence_cache: OnceLock::new() })
            }
        }
    }

    /// The m×2m matrix `[I | H/√m]` with `H` the Sylvester Hadamard matrix.
    pub fn identity_hadamard(m: usize) -> Result<Self, MatrixError> {
        if m < 2 || !m.is_power_of_two() {
            return Err(MatrixError::NotPowerOfTwo(m));
        }
        let h = sylvester_hadamard(m);
        let scale = 1.0 / (m as f64).sqrt();
        let mut entries = Matrix::zeros(m, 2 * m);
        for i in 0..m {
            entries[(i, i)] = 1.0;
            for j in 0..m {
                entries[(i, m + j)] = h[(i, j)] * scale;
            }
        }
        Ok(Self {
            entries,
            column_normalized: true,
            // every cross inner product between I and H/√m is ±1/√m and the
            // Hadamard columns are mutually orthogonal
            coherence_cache: OnceLock::from(scale),
        })
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn m(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n(&self) -> usize {
        self.entries.ncols()
    }

    pub fn column_normalized(&self) -> bool {
        self.column_normalized
    }

    /// Cached coherence, if it has been computed.
    pub fn coherence_cache(&self) -> Option<f64> {
        self.coherence_cache.get().copied()
    }

    /// Maximum absolute inner product between distinct columns.
    pub fn coherence(&self) -> Result<f64, MatrixError> {
        if !self.column_normalized {
            return Err(MatrixError::NotNormalized);
        }
        Ok(*self.coherence_cache.get_or_init(|| max_off_diagonal(&(self.entries.transpose() * &self.entries))))
    }

    /// Largest sparsity levels for which the BP/DS and Lasso coherence
    /// conditions hold, capped at n.
    pub fn sparsity_budget(&self) -> Result<SparsityBudget, MatrixError> {
        Ok(SparsityBudget::from_coherence(self.coherence()?, self.n()))
    }

    /// Spectrum of `A_Sᵀ A_S` against the interval `1 ± (s−1)μ`.
    pub fn sparse_gram_bounds_check(&self, support: &[usize]) -> Result<GramCheck, MatrixError> {
        let mu = self.coherence()?;
        let gram = self.sparse_gram(support)?;
        let s = support.len();
        let (min_eig, max_eig) = match s {
            1 => (gram[(0, 0)], gram[(0, 0)]),
            2 => {
                let g = 0.5 * (gram[(0, 1)] + gram[(1, 0)]);
                let mid = 0.5 * (gram[(0, 0)] + gram[(1, 1)]);
                let half = (0.25 * (gram[(0, 0)] - gram[(1, 1)]).powi(2) + g * g).sqrt();
                (mid - half, mid + half)
            }
            _ => symmetric_eig_range(&gram),
        };
        let spread = (s as f64 - 1.0) * mu;
        let lower = 1.0 - spread;
        let upper = 1.0 + spread;
        let slack = GRAM_SLACK;
        Ok(GramCheck { lower, upper, min_eig, max_eig, holds: lower <= min_eig + slack && max_eig <= upper + slack })
    }

    /// The Gram submatrix `A_Sᵀ A_S`.
    pub fn sparse_gram(&self, support: &[usize]) -> Result<Matrix, MatrixError> {
        if support.is_empty() {
            return Err(MatrixError::EmptySupport);
        }
        if let Some(&index) = support.iter().find(|&&j| j >= self.n()) {
            return Err(MatrixError::IndexOutOfRange { index, n: self.n() });
        }
        let sub = columns(&self.entries, support);
        Ok(sub.transpose() * sub)
    }
}

/// Rounding allowance when comparing computed eigenvalues with `1 ± (s−1)μ`.
const GRAM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GramCheck {
    pub lower: f64,
    pub upper: f64,
    pub min_eig: f64,
    pub max_eig: f64,
    pub holds: bool,
}

/// Sparsity levels admitted by the coherence conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityBudget {
    /// Largest s with μ < 1/(2s−1).
    pub s_bp_ds: usize,
    /// Largest s with μ < 1/(4s).
    pub s_lasso: usize,
}

impl SparsityBudget {
    /// Budgets for coherence `mu` on an n-column matrix. At μ = 0 both
    /// conditions hold for every s, so both budgets are capped at n.
    pub fn from_coherence(mu: f64, n: usize) -> Self {
        Self {
            s_bp_ds: largest_satisfying(n, |s| bp_ds_condition(mu, s)),
            s_lasso: largest_satisfying(n, |s| lasso_condition(mu, s)),
        }
    }
}

// Both conditions are monotone in s, so a binary search over 1..=cap works.
fn largest_satisfying(cap: usize, holds: impl Fn(usize) -> bool) -> usize {
    if cap == 0 || !holds(1) {
        return 0;
    }
    let (mut lo, mut hi) = (1, cap);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// √((n−m)/(m(n−1))), the dimension-forced floor on the coherence of any
/// m×n matrix with unit columns.
pub fn coherence_lower_bound(m: usize, n: usize) -> Result<f64, MatrixError> {
    if m == 0 || n <= m {
        return Err(MatrixError::InvalidDims(format!("need n > m >= 1, got m={m}, n={n}")));
    }
    let (m, n) = (m as f64, n as f64);
    Ok(((n - m) / (m * (n - 1.0))).sqrt())
}

/// Sylvester recursion `H_{2k} = [[H_k, H_k], [H_k, −H_k]]`, `H_1 = [1]`.
pub fn sylvester_hadamard(m: usize) -> Matrix {
    assert!(m.is_power_of_two(), "Hadamard order must be a power of two");
    let mut h = Matrix::from_element(1, 1, 1.0);
    while h.nrows() < m {
        let k = h.nrows();
        let mut next = Matrix::zeros(2 * k, 2 * k);
        next.view_mut((0, 0), (k, k)).copy_from(&h);
        next.view_mut((0, k), (k, k)).copy_from(&h);
        next.view_mut((k, 0), (k, k)).copy_from(&h);
        next.view_mut((k, k), (k, k)).copy_from(&(-&h));
        h = next;
    }
    h
}

fn max_off_diagonal(gram: &Matrix) -> f64 {
    let n = gram.ncols();
    let mut best = 0.0f64;
    for j in 0..n {
        for i in 0..j {
            best = best.max(gram[(i, j)].abs());
        }
    }
    best
}

fn check_dims(m: usize, n: usize) -> Result<(), MatrixError> {
    if m < 1 || n < 2 {
        return Err(MatrixError::InvalidDims(format!("need m >= 1 and n >= 2, got m={m}, n={n}")));
    }
    Ok(())
}
