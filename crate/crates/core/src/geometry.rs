//! Structural properties of the error vector and the measurement matrix:
//! best s-term approximation, cone constraints, the robust null space
//! property, sparse representations of the polytope T(κ,s) and the ℓ1
//! quotient property.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{norm1, norm_inf};
use crate::measurement::{MatrixError, MeasurementMatrix};
use crate::solvers::{self, SolveError, SolverConfig};
use crate::Vector;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("robust null space constants are not applicable: {0}")]
    NotApplicable(String),
    #[error("vector is not in T(κ={kappa}, s={s})")]
    NotInPolytope { kappa: f64, s: usize },
    #[error("‖Ax‖₂ vanishes; quotient ratio undefined")]
    ZeroImage,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Indices of `x` ordered by decreasing magnitude, ties by lowest index.
pub fn magnitude_order(x: &Vector) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()).then(a.cmp(&b)));
    idx
}

/// Indices of the `s` largest-magnitude entries (lowest index wins ties).
pub fn top_s_support(x: &Vector, s: usize) -> Vec<usize> {
    let mut idx = magnitude_order(x);
    idx.truncate(s.min(x.len()));
    idx.sort_unstable();
    idx
}

/// `(x_max(s), x_−max(s))`.
pub fn best_s_term(x: &Vector, s: usize) -> (Vector, Vector) {
    let mut head = Vector::zeros(x.len());
    for j in top_s_support(x, s) {
        head[j] = x[j];
    }
    let tail = x - &head;
    (head, tail)
}

/// ℓ1 norm of `x_−max(s)`.
pub fn tail_l1(x: &Vector, s: usize) -> f64 {
    norm1(&best_s_term(x, s).1)
}

// Relative allowance for solver round-off in inequality checks.
fn allowance(rhs: f64) -> f64 {
    1e-9 * (1.0 + rhs.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LassoConeCheck {
    pub ineq1: bool,
    pub ineq2: bool,
    pub slack1: f64,
    pub slack2: f64,
}

/// The two Lasso cone inequalities for `h = x̂ − x`:
/// ‖h_−max(s)‖₁ ≤ 3‖h_max(s)‖₁ + 4‖x_−max(s)‖₁ and
/// ‖Ah‖₂² ≤ 3λ‖h_max(s)‖₁ + 4λ‖x_−max(s)‖₁.
pub fn cone_constraint_check_lasso(
    m: &MeasurementMatrix,
    x: &Vector,
    x_hat: &Vector,
    s: usize,
    lambda: f64,
) -> Result<LassoConeCheck, GeometryError> {
    check_len(m.n(), x)?;
    check_len(m.n(), x_hat)?;
    let h = x_hat - x;
    let (h_head, h_tail) = best_s_term(&h, s);
    let x_tail = tail_l1(x, s);
    let rhs1 = 3.0 * norm1(&h_head) + 4.0 * x_tail;
    let slack1 = rhs1 - norm1(&h_tail);
    let rhs2 = lambda * rhs1;
    let slack2 = rhs2 - (m.entries() * &h).norm_squared();
    Ok(LassoConeCheck { ineq1: slack1 >= -allowance(rhs1), ineq2: slack2 >= -allowance(rhs2), slack1, slack2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeCheck {
    pub holds: bool,
    pub slack: f64,
}

/// ‖h_−max(s)‖₁ ≤ ‖h_max(s)‖₁ + 2‖x_−max(s)‖₁ for `h = x̂ − x`.
pub fn cone_constraint_check_ds(x: &Vector, x_hat: &Vector, s: usize) -> Result<ConeCheck, GeometryError> {
    check_len(x.len(), x_hat)?;
    let h = x_hat - x;
    let (h_head, h_tail) = best_s_term(&h, s);
    let rhs = norm1(&h_head) + 2.0 * tail_l1(x, s);
    let slack = rhs - norm1(&h_tail);
    Ok(ConeCheck { holds: slack >= -allowance(rhs), slack })
}

/// Constants of the ℓ2 robust null space property implied by coherence μ
/// for a given ι > 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RnspConstants {
    pub iota: f64,
    pub s: usize,
    pub mu: f64,
    /// ιs − 1.
    pub delta: f64,
    pub rho: f64,
    /// Multiplier of ‖Ax‖₂.
    pub tau_l2: f64,
    /// Multiplier of ‖A*Ax‖∞.
    pub tau_ds: f64,
    pub applicable: bool,
}

/// √(ι−1)/(√ι(ιs−1)), the largest coherence for which the constants apply.
pub fn rnsp_coherence_threshold(s: usize, iota: f64) -> f64 {
    (iota - 1.0).sqrt() / (iota.sqrt() * (iota * s as f64 - 1.0))
}

pub fn rnsp_constants(mu: f64, s: usize, iota: f64) -> RnspConstants {
    let delta = iota * s as f64 - 1.0;
    let dm = delta * mu;
    let contraction = 1.0 - dm * dm;
    let rho = dm / ((iota - 1.0) * contraction).sqrt();
    let tau_l2 = 2.0 * (1.0 + dm).sqrt() / contraction;
    let tau_ds = 2.0 * (iota * s as f64).sqrt() / contraction;
    let applicable =
        iota > 1.0 && s >= 1 && mu.is_finite() && mu > 0.0 && mu < 1.0 && mu < rnsp_coherence_threshold(s, iota);
    RnspConstants { iota, s, mu, delta, rho, tau_l2, tau_ds, applicable }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RnspBound {
    /// τ₁‖Ax‖₂.
    L2,
    /// τ₂‖A*Ax‖∞.
    Dantzig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RnspCheck {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// ‖x_max(s)‖₂ ≤ ρ‖x_−max(s)‖₁/√s + τ‖·‖ for one vector `x`.
pub fn rnsp_check(
    m: &MeasurementMatrix,
    x: &Vector,
    constants: &RnspConstants,
    bound: RnspBound,
) -> Result<RnspCheck, GeometryError> {
    if !m.column_normalized() {
        return Err(MatrixError::NotNormalized.into());
    }
    if !constants.applicable {
        return Err(GeometryError::NotApplicable(format!(
            "μ={} is not below √(ι−1)/(√ι(ιs−1))={}",
            constants.mu,
            rnsp_coherence_threshold(constants.s, constants.iota)
        )));
    }
    check_len(m.n(), x)?;
    let s = constants.s;
    let (head, tail) = best_s_term(x, s);
    let ax = m.entries() * x;
    let measurement = match bound {
        RnspBound::L2 => constants.tau_l2 * ax.norm(),
        RnspBound::Dantzig => constants.tau_ds * norm_inf(&(m.entries().transpose() * ax)),
    };
    let lhs = head.norm();
    let rhs = constants.rho * norm1(&tail) / (s as f64).sqrt() + measurement;
    Ok(RnspCheck { holds: lhs <= rhs * (1.0 + 1e-12) + 1e-15, lhs, rhs })
}

const POLYTOPE_SLACK: f64 = 1e-12;

/// ‖x‖∞ ≤ κ and ‖x‖₁ ≤ sκ, up to 1e-12.
pub fn polytope_membership(x: &Vector, kappa: f64, s: usize) -> bool {
    let slack = POLYTOPE_SLACK * kappa.max(1.0);
    norm_inf(x) <= kappa + slack && norm1(x) <= s as f64 * kappa + s as f64 * slack
}

/// x = Σ ρᵢ uᵢ with every uᵢ ∈ U(κ, s, x).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolytopeDecomposition {
    pub weights: Vec<f64>,
    #[serde(with = "crate::io::vectors_serde")]
    pub atoms: Vec<Vector>,
    pub count: usize,
}

impl PolytopeDecomposition {
    pub fn reconstruct(&self, n: usize) -> Vector {
        self.weights.iter().zip(&self.atoms).fold(Vector::zeros(n), |acc, (w, u)| acc + u * *w)
    }
}

/// Writes `x ∈ T(κ,s)` as a convex combination of s-sparse vectors sharing
/// its support and ℓ1 norm with entries bounded by κ.
///
/// Works on |x|: the residual point p always lies in the capped simplex
/// {0 ≤ p ≤ κ, Σp = ‖x‖₁} over supp(x), whose vertices are s-sparse. Each
/// step picks a vertex on the smallest face containing p, peels off the
/// largest multiple of it that keeps the remainder in the set, and pins at
/// least one more coordinate to 0 or κ. It stops once the remainder is
/// s-sparse.
pub fn polytope_decompose(x: &Vector, kappa: f64, s: usize) -> Result<PolytopeDecomposition, GeometryError> {
    if kappa.is_nan() || kappa <= 0.0 || s == 0 || !polytope_membership(x, kappa, s) {
        return Err(GeometryError::NotInPolytope { kappa, s });
    }
    let n = x.len();
    let support: Vec<usize> = (0..n).filter(|&j| x[j] != 0.0).collect();
    let signs: Vec<f64> = support.iter().map(|&j| x[j].signum()).collect();
    let total: f64 = support.iter().map(|&j| x[j].abs()).sum();
    let snap = 1e-14 * kappa;
    let mut p: Vec<f64> = support.iter().map(|&j| x[j].abs().min(kappa)).collect();

    let to_atom = |v: &[f64]| {
        let mut u = Vector::zeros(n);
        for (k, &j) in support.iter().enumerate() {
            u[j] = signs[k] * v[k];
        }
        u
    };

    let mut weights = Vec::new();
    let mut atoms = Vec::new();
    let mut remaining = 1.0;
    loop {
        let nonzero = p.iter().filter(|&&v| v > 0.0).count();
        if nonzero <= s {
            weights.push(remaining);
            atoms.push(to_atom(&p));
            break;
        }
        let vertex = face_vertex(&p, kappa, total, snap);
        let mut theta = 1.0f64;
        for (pi, vi) in p.iter().zip(&vertex) {
            if *vi > 0.0 {
                theta = theta.min(pi / vi);
            }
            if *vi < kappa {
                theta = theta.min((kappa - pi) / (kappa - vi));
            }
        }
        // a vanishing remainder would be amplified by 1/(1−θ); absorb it
        if theta >= 1.0 - 1e-15 || remaining * (1.0 - theta) < 1e-13 {
            weights.push(remaining);
            atoms.push(to_atom(&vertex));
            break;
        }
        weights.push(remaining * theta);
        atoms.push(to_atom(&vertex));
        remaining *= 1.0 - theta;
        for (pi, vi) in p.iter_mut().zip(&vertex) {
            let mut next = (*pi - theta * vi) / (1.0 - theta);
            if next < snap {
                next = 0.0;
            } else if next > kappa - snap {
                next = kappa;
            }
            *pi = next;
        }
        // restore the ℓ1 level lost to snapping on the free coordinates
        let drift = total - p.iter().sum::<f64>();
        if let Some(k) = (0..p.len()).filter(|&k| p[k] > 0.0 && p[k] < kappa).max_by(|&a, &b| p[a].total_cmp(&p[b])) {
            p[k] = (p[k] + drift).clamp(0.0, kappa);
        }
    }
    let count = weights.len();
    Ok(PolytopeDecomposition { weights, atoms, count })
}

// A vertex of {0 ≤ v ≤ κ, Σv = total} on the face of p: saturated and zero
// coordinates stay put, the largest free coordinates are raised to κ and one
// takes the remainder.
fn face_vertex(p: &[f64], kappa: f64, total: f64, snap: f64) -> Vec<f64> {
    let mut v = vec![0.0; p.len()];
    let mut budget = total;
    let mut free = Vec::new();
    for (k, &pk) in p.iter().enumerate() {
        if pk >= kappa {
            v[k] = kappa;
            budget -= kappa;
        } else if pk > 0.0 {
            free.push(k);
        }
    }
    free.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
    for k in free {
        if budget <= snap {
            break;
        }
        let take = budget.min(kappa);
        v[k] = take;
        budget -= take;
    }
    v
}

/// ‖x̃*‖₁ / ‖Ax‖₂ where x̃* is the ℓ1-minimal preimage of Ax.
pub fn lq_ratio(m: &MeasurementMatrix, x: &Vector, cfg: &SolverConfig) -> Result<f64, GeometryError> {
    check_len(m.n(), x)?;
    let image = m.entries() * x;
    let norm = image.norm();
    if norm < 1e-14 {
        return Err(GeometryError::ZeroImage);
    }
    let outcome = solvers::solve_bp(m, &image, cfg)?;
    Ok(outcome.objective / norm)
}

/// Constant C with ‖x̃‖₂ ≤ C‖Ax‖₂ under LQ(θ/√s) and (s−1)μ < 1.
pub fn lq_l2_amplification(theta: f64, s: usize, mu: f64) -> f64 {
    let spread = (s as f64 - 1.0) * mu;
    1.0 / theta + (1.0 + spread).sqrt() / (theta * (1.0 - spread).sqrt()) + 1.0 / (1.0 - spread).sqrt()
}

/// s* = m / ln(en/m).
pub fn lq_sparsity(m: usize, n: usize) -> f64 {
    let (m, n) = (m as f64, n as f64);
    m / (std::f64::consts::E * n / m).ln()
}

/// 34√s*, the ratio ceiling of the Gaussian quotient property for Ã = A/√m.
pub fn gaussian_lq_threshold(m: usize, n: usize) -> f64 {
    34.0 * lq_sparsity(m, n).sqrt()
}

fn check_len(expected: usize, v: &Vector) -> Result<(), GeometryError> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(GeometryError::DimensionMismatch { expected, got: v.len() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::GaussianScale;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn best_s_term_tie_rule_and_edges() {
        let x = v(&[3.0, -3.0, 1.0]);
        let (head, tail) = best_s_term(&x, 1);
        assert_eq!(head, v(&[3.0, 0.0, 0.0]));
        assert_eq!(tail, v(&[0.0, -3.0, 1.0]));
        let (head, tail) = best_s_term(&x, 0);
        assert_eq!(head, Vector::zeros(3));
        assert_eq!(tail, x);
        let (head, tail) = best_s_term(&x, 3);
        assert_eq!(head, x);
        assert_eq!(tail, Vector::zeros(3));
    }

    #[test]
    fn lasso_cone_perfect_recovery() {
        let m = MeasurementMatrix::identity_hadamard(8).unwrap();
        let x = v(&[1.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let c = cone_constraint_check_lasso(&m, &x, &x, 2, 0.3).unwrap();
        assert!(c.ineq1 && c.ineq2);
        assert!(c.slack1 >= 0.0 && c.slack2 >= 0.0);
    }

    #[test]
    fn ds_cone_perfect_recovery_slack() {
        let x = v(&[2.0, 0.3, -0.1, 0.0]);
        let c = cone_constraint_check_ds(&x, &x, 1).unwrap();
        assert!(c.holds);
        assert!((c.slack - 0.8).abs() < 1e-15);
    }

    #[test]
    fn ds_cone_holds_for_norm_decreasing_perturbations() {
        use rand::Rng;
        let mut rng = crate::rng::seeded(21);
        for _ in 0..500 {
            let n = 12;
            let s = 3;
            let mut x = Vector::zeros(n);
            for j in rand::seq::index::sample(&mut rng, n, s) {
                x[j] = rng.random_range(-2.0..2.0);
            }
            let mut xh = &x + crate::rng::gaussian_vector(&mut rng, n, 0.5);
            let ratio = norm1(&x) / norm1(&xh);
            if ratio < 1.0 {
                xh *= ratio * rng.random_range(0.5..1.0);
            }
            assert!(norm1(&xh) <= norm1(&x) + 1e-12);
            assert!(cone_constraint_check_ds(&x, &xh, s).unwrap().holds);
        }
    }

    #[test]
    fn rnsp_constants_example() {
        let c = rnsp_constants(0.125, 2, 1.5);
        assert!((c.delta * c.mu - 0.25).abs() < 1e-15);
        assert!((c.rho - 0.36515).abs() < 1e-5);
        assert!((c.tau_l2 - 2.38514).abs() < 1e-5);
        assert!((c.tau_ds - 3.69504).abs() < 1e-5);
        assert!(c.applicable);
        assert!((rnsp_coherence_threshold(2, 1.5) - 0.28868).abs() < 1e-5);
        assert!((rnsp_coherence_threshold(3, 1.5) - 0.16496).abs() < 1e-5);
    }

    #[test]
    fn rnsp_threshold_matches_closed_form_at_three_halves() {
        for s in 1..50 {
            let general = rnsp_coherence_threshold(s, 1.5);
            let specific = 1.0 / (3f64.sqrt() * (1.5 * s as f64 - 1.0));
            assert!((general - specific).abs() <= 1e-12 * specific);
        }
    }

    #[test]
    fn rho_below_one_when_applicable() {
        for s in 1..8 {
            for &iota in &[1.1, 1.5, 2.0, 3.0] {
                let edge = rnsp_coherence_threshold(s, iota).min(0.999);
                for k in 1..50 {
                    let mu = edge * k as f64 / 50.0;
                    let c = rnsp_constants(mu, s, iota);
                    if c.applicable {
                        assert!(c.rho < 1.0, "s={s} iota={iota} mu={mu}");
                    }
                }
            }
        }
    }

    #[test]
    fn rnsp_check_zero_and_sparse() {
        let m = MeasurementMatrix::identity_hadamard(64).unwrap();
        let c = rnsp_constants(0.125, 3, 1.5);
        let r = rnsp_check(&m, &Vector::zeros(128), &c, RnspBound::L2).unwrap();
        assert!(r.holds && r.lhs == 0.0 && r.rhs == 0.0);

        let mut x = Vector::zeros(128);
        x[5] = 1.0;
        x[70] = -2.0;
        x[100] = 0.5;
        let r = rnsp_check(&m, &x, &c, RnspBound::L2).unwrap();
        assert!((r.lhs - x.norm()).abs() < 1e-15);
        // tail vanishes: rhs = τ₁‖Ax‖₂ ≥ τ₁√(1−2μ)‖x‖₂ by the sparse Gram bound
        assert!((r.rhs - c.tau_l2 * (m.entries() * &x).norm()).abs() < 1e-12);
        assert!(r.rhs >= c.tau_l2 * (1.0 - 2.0 * 0.125f64).sqrt() * x.norm() - 1e-12);
        assert!(r.holds);

        let bad = rnsp_constants(0.3, 3, 1.5);
        assert!(matches!(rnsp_check(&m, &x, &bad, RnspBound::L2), Err(GeometryError::NotApplicable(_))));
    }

    #[test]
    fn polytope_membership_examples() {
        assert!(polytope_membership(&v(&[0.5, 0.5]), 1.0, 1));
        assert!(!polytope_membership(&v(&[1.5, 0.0]), 1.0, 2));
        assert!(polytope_membership(&Vector::zeros(4), 1.0, 1));
        assert!(!polytope_membership(&v(&[0.9, 0.9, 0.9]), 1.0, 2));
    }

    fn check_decomposition(x: &Vector, kappa: f64, s: usize, d: &PolytopeDecomposition) {
        assert_eq!(d.count, d.weights.len());
        assert_eq!(d.count, d.atoms.len());
        assert!(d.weights.iter().all(|&w| w >= 0.0));
        assert!((d.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let l1 = norm1(x);
        for u in &d.atoms {
            assert!(crate::linalg::count_nonzero(u) <= s);
            assert!((0..x.len()).all(|j| u[j] == 0.0 || x[j] != 0.0));
            assert!((norm1(u) - l1).abs() <= 1e-10);
            assert!(norm_inf(u) <= kappa * (1.0 + 1e-12));
        }
        assert!(norm_inf(&(d.reconstruct(x.len()) - x)) <= 1e-10);
    }

    #[test]
    fn polytope_decompose_sparse_is_single_atom() {
        let x = v(&[0.0, 0.7, 0.0, -0.2]);
        let d = polytope_decompose(&x, 1.0, 2).unwrap();
        assert_eq!(d.count, 1);
        assert_eq!(d.weights, vec![1.0]);
        assert_eq!(d.atoms[0], x);
    }

    #[test]
    fn polytope_decompose_two_halves() {
        let kappa = 2.0;
        let x = v(&[1.0, 1.0]);
        let d = polytope_decompose(&x, kappa, 1).unwrap();
        assert_eq!(d.count, 2);
        assert!((d.weights[0] - 0.5).abs() < 1e-15 && (d.weights[1] - 0.5).abs() < 1e-15);
        assert_eq!(d.atoms[0], v(&[2.0, 0.0]));
        assert_eq!(d.atoms[1], v(&[0.0, 2.0]));
        check_decomposition(&x, kappa, 1, &d);
    }

    #[test]
    fn polytope_decompose_rejects_outside() {
        assert!(matches!(polytope_decompose(&v(&[0.9, 0.9, 0.9]), 1.0, 2), Err(GeometryError::NotInPolytope { .. })));
    }

    #[test]
    fn lq_ratio_rejects_null_vectors_and_is_scale_invariant() {
        let m = MeasurementMatrix::identity_hadamard(4).unwrap();
        // (e0 − H col 0 scaled) lies in the kernel of [I | H/2]
        let mut x = Vector::zeros(8);
        x[0] = 0.5;
        x[1] = 0.5;
        x[2] = 0.5;
        x[3] = 0.5;
        x[4] = -1.0;
        assert!((m.entries() * &x).norm() < 1e-14);
        assert!(matches!(lq_ratio(&m, &x, &SolverConfig::default()), Err(GeometryError::ZeroImage)));

        let g = MeasurementMatrix::gaussian_ensemble(6, 12, 4, GaussianScale::RawOverSqrtM).unwrap();
        let y = crate::rng::gaussian_vector(&mut crate::rng::seeded(5), 12, 1.0);
        let cfg = SolverConfig::default();
        let a = lq_ratio(&g, &y, &cfg).unwrap();
        let b = lq_ratio(&g, &(&y * -3.5), &cfg).unwrap();
        assert!((a - b).abs() <= 1e-8 * a);
    }

    #[test]
    fn lq_ratio_at_least_one_for_orthonormal_rows() {
        // rows of [I | H/√m]/√2 are orthonormal, so A Aᵀ = I
        let base = MeasurementMatrix::identity_hadamard(8).unwrap();
        let scaled = MeasurementMatrix::from_entries(base.entries() / 2f64.sqrt()).unwrap();
        let aat = scaled.entries() * scaled.entries().transpose();
        assert!((aat - crate::Matrix::identity(8, 8)).amax() < 1e-14);
        let mut rng = crate::rng::seeded(9);
        for _ in 0..20 {
            let x = crate::rng::gaussian_vector(&mut rng, 16, 1.0);
            let r = lq_ratio(&scaled, &x, &SolverConfig::default()).unwrap();
            assert!(r >= 1.0 - 1e-9, "ratio {r}");
        }
    }

    #[test]
    fn lq_amplification_examples() {
        assert!((lq_l2_amplification(1.0, 2, 0.125) - 3.20294).abs() < 1e-5);
        assert!((lq_l2_amplification(0.5, 4, 0.0) - (2.0 / 0.5 + 1.0)).abs() < 1e-15);
        assert_eq!(lq_l2_amplification(0.7, 1, 0.4), lq_l2_amplification(0.7, 3, 0.0));
    }

    #[test]
    fn gaussian_lq_threshold_value() {
        let s_star = lq_sparsity(32, 64);
        assert!((s_star - 32.0 / (2.0 * std::f64::consts::E).ln()).abs() < 1e-12);
        assert!((s_star - 18.90).abs() < 0.01);
        assert!((gaussian_lq_threshold(32, 64) - 147.8).abs() < 0.05);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn vector(n: usize) -> impl Strategy<Value = Vector> {
            proptest::collection::vec(prop_oneof![Just(0.0), -5.0f64..5.0, Just(1.0), Just(-1.0)], n)
                .prop_map(Vector::from_vec)
        }

        proptest! {
            #[test]
            fn best_s_term_partitions(x in vector(10), s in 0usize..=10) {
                let (head, tail) = best_s_term(&x, s);
                prop_assert_eq!(&head + &tail, x.clone());
                prop_assert!(crate::linalg::count_nonzero(&head) <= s);
                let min_head = (0..10).filter(|&j| head[j] != 0.0).map(|j| head[j].abs()).fold(f64::INFINITY, f64::min);
                prop_assert!(tail.iter().all(|t| t.abs() <= min_head));
            }

            #[test]
            fn decomposition_invariants(raw in proptest::collection::vec(-1.0f64..1.0, 12), s in 1usize..5, kappa in 0.1f64..3.0) {
                let mut x = Vector::from_vec(raw) * kappa;
                let l1 = norm1(&x);
                if l1 > s as f64 * kappa {
                    x *= s as f64 * kappa / l1;
                }
                let d = polytope_decompose(&x, kappa, s).unwrap();
                check_decomposition(&x, kappa, s, &d);
            }
        }
    }
}
