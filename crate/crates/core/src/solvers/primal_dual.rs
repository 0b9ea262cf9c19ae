use super::{check_rhs, finish, soft_threshold, SolveError, SolveOutcome, SolverConfig};
use crate::linalg::{columns, gather, lstsq, norm1, norm_inf, power_iteration_lipschitz, scatter, sign};
use crate::measurement::MeasurementMatrix;
use crate::{Matrix, Vector};

const POWER_ITERATIONS: usize = 30;
const POWER_TOL: f64 = 1e-10;
const NORM_MARGIN: f64 = 1.01;
const STEP_SHRINK: f64 = 0.99;
const CHECK_EVERY: usize = 10;
const RESTART_SUFFICIENT: f64 = 0.2;
const RESTART_NECESSARY: f64 = 0.8;
const RESTART_ARTIFICIAL: f64 = 0.36;

/// Basis pursuit. Fails with `Infeasible` when `b` is not in the range of A.
pub fn solve_bp(m: &MeasurementMatrix, b: &Vector, cfg: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    cfg.validate()?;
    check_rhs(m.m(), b)?;
    let a = m.entries();
    let floor = cfg.tolerance * b.norm().max(1.0);
    let ls = lstsq(a, b).ok_or(SolveError::Infeasible { residual: f64::INFINITY })?;
    let residual = (a * ls - b).norm();
    if residual > floor {
        return Err(SolveError::Infeasible { residual });
    }
    Program::new(a, b, Kind::Bp).run(cfg)
}

/// Quadratically constrained basis pursuit; `eta = 0` is basis pursuit.
pub fn solve_qcbp(m: &MeasurementMatrix, b: &Vector, eta: f64, cfg: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    check_level(eta)?;
    if eta == 0.0 {
        return solve_bp(m, b, cfg);
    }
    cfg.validate()?;
    check_rhs(m.m(), b)?;
    Program::new(m.entries(), b, Kind::Qcbp { eta }).run(cfg)
}

/// Dantzig selector.
pub fn solve_dantzig(
    m: &MeasurementMatrix,
    b: &Vector,
    eta: f64,
    cfg: &SolverConfig,
) -> Result<SolveOutcome, SolveError> {
    check_level(eta)?;
    cfg.validate()?;
    check_rhs(m.m(), b)?;
    Program::new(m.entries(), b, Kind::Dantzig { eta }).run(cfg)
}

fn check_level(eta: f64) -> Result<(), SolveError> {
    if eta >= 0.0 && eta.is_finite() {
        Ok(())
    } else {
        Err(SolveError::InvalidParameter(format!("eta must be nonnegative, got {eta}")))
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Bp,
    Qcbp { eta: f64 },
    Dantzig { eta: f64 },
}

/// `min ‖x‖₁ + F(Kx)` with K = A (BP, QCBP) or K = AᵀA (Dantzig), and F the
/// indicator of the constraint set around `target`.
struct Program<'a> {
    a: &'a Matrix,
    b: &'a Vector,
    kind: Kind,
    gram: Option<Matrix>,
    target: Vector,
}

struct Certificate {
    primal: f64,
    optimality: f64,
    ok: bool,
}

impl<'a> Program<'a> {
    fn new(a: &'a Matrix, b: &'a Vector, kind: Kind) -> Self {
        match kind {
            Kind::Dantzig { .. } => Self { a, b, kind, gram: Some(a.transpose() * a), target: a.transpose() * b },
            _ => Self { a, b, kind, gram: None, target: b.clone() },
        }
    }

    fn k(&self, x: &Vector) -> Vector {
        match &self.gram {
            Some(g) => g * x,
            None => self.a * x,
        }
    }

    fn kt(&self, y: &Vector) -> Vector {
        match &self.gram {
            Some(g) => g * y,
            None => self.a.transpose() * y,
        }
    }

    fn operator_norm(&self) -> f64 {
        let sq = power_iteration_lipschitz(self.a, POWER_ITERATIONS, POWER_TOL) * NORM_MARGIN;
        match self.kind {
            Kind::Dantzig { .. } => sq,
            _ => sq.sqrt(),
        }
    }

    /// prox of σF* via Moreau: v − σ·proj(v/σ).
    fn dual_prox(&self, v: Vector, sigma: f64) -> Vector {
        let t = &self.target;
        match self.kind {
            Kind::Bp => v - t * sigma,
            Kind::Qcbp { eta } => {
                let w = &v / sigma;
                let d = &w - t;
                let nd = d.norm();
                if nd <= eta {
                    Vector::zeros(v.len())
                } else {
                    let proj = t + d * (eta / nd);
                    v - proj * sigma
                }
            }
            Kind::Dantzig { eta } => Vector::from_iterator(
                v.len(),
                v.iter().zip(t.iter()).map(|(&vi, &ti)| {
                    let d = vi / sigma - ti;
                    if d.abs() <= eta {
                        0.0
                    } else {
                        vi - sigma * (ti + eta * d.signum())
                    }
                }),
            ),
        }
    }

    fn primal_residual(&self, kx: &Vector) -> f64 {
        let d = kx - &self.target;
        match self.kind {
            Kind::Bp => d.norm(),
            Kind::Qcbp { eta } => (d.norm() - eta).max(0.0),
            Kind::Dantzig { eta } => (norm_inf(&d) - eta).max(0.0),
        }
    }

    fn primal_tolerance(&self, tol: f64) -> f64 {
        match self.kind {
            Kind::Bp => tol * self.b.norm().max(1.0),
            _ => tol,
        }
    }

    fn dual_value(&self, y: &Vector) -> f64 {
        let lin = -y.dot(&self.target);
        match self.kind {
            Kind::Bp => lin,
            Kind::Qcbp { eta } => lin - eta * y.norm(),
            Kind::Dantzig { eta } => lin - eta * norm1(y),
        }
    }

    fn certify(&self, x: &Vector, kx: &Vector, y: &Vector, kty: &Vector, tol: f64) -> Certificate {
        let primal = self.primal_residual(kx);
        let scale = norm_inf(kty).max(1.0);
        let objective = norm1(x);
        let gap = objective - self.dual_value(&(y / scale));
        let optimality = gap.abs() / objective.max(1.0);
        Certificate { primal, optimality, ok: primal <= self.primal_tolerance(tol) && optimality <= tol }
    }

    fn outcome(&self, x: Vector, iterations: usize, cert: &Certificate) -> SolveOutcome {
        SolveOutcome {
            objective: norm1(&x),
            estimate: x,
            iterations,
            converged: cert.ok,
            primal_residual: cert.primal,
            optimality_residual: cert.optimality,
        }
    }

    /// Primal residual + dual infeasibility + |gap|, unscaled.
    fn kkt_error(&self, x: &Vector, kx: &Vector, y: &Vector, kty: &Vector) -> f64 {
        let dual_infeasibility = (norm_inf(kty) - 1.0).max(0.0);
        let gap = (norm1(x) - self.dual_value(y)).abs();
        self.primal_residual(kx) + dual_infeasibility + gap
    }

    // PDHG with adaptive restarts to the better of the current and averaged
    // iterates, rebalancing the primal weight ω at each restart.
    fn run(&self, cfg: &SolverConfig) -> Result<SolveOutcome, SolveError> {
        let tol = cfg.tolerance;
        let n = self.a.ncols();
        let dual_len = self.target.len();
        let mut x = Vector::zeros(n);
        let mut y = Vector::zeros(dual_len);
        let mut kx = Vector::zeros(dual_len);
        let mut kty = Vector::zeros(n);

        let mut cert = self.certify(&x, &kx, &y, &kty, tol);
        if cert.ok {
            return Ok(self.outcome(x, 0, &cert));
        }

        let norm = self.operator_norm();
        if norm <= 0.0 {
            return finish(self.outcome(x, 0, &cert));
        }
        let mut omega = cfg.dual_step_scale;
        let mut last_polished: Option<(Vec<usize>, Vec<usize>)> = None;

        let mut anchor = (x.clone(), y.clone());
        let mut anchor_error = self.kkt_error(&x, &kx, &y, &kty);
        let mut previous_candidate = f64::INFINITY;
        let mut x_sum = Vector::zeros(n);
        let mut y_sum = Vector::zeros(dual_len);
        let mut since_restart = 0usize;

        for iter in 1..=cfg.max_iterations {
            let tau = STEP_SHRINK / (omega * norm);
            let sigma = STEP_SHRINK * omega / norm;
            let x_new = soft_threshold(&(&x - &kty * tau), tau);
            let kx_new = self.k(&x_new);
            let extrapolated = &kx_new * 2.0 - &kx;
            y = self.dual_prox(&y + extrapolated * sigma, sigma);
            kty = self.kt(&y);
            x = x_new;
            kx = kx_new;
            x_sum += &x;
            y_sum += &y;
            since_restart += 1;

            if iter % CHECK_EVERY != 0 && iter != cfg.max_iterations {
                continue;
            }
            cert = self.certify(&x, &kx, &y, &kty, tol);
            if cert.ok {
                return Ok(self.outcome(x, iter, &cert));
            }
            let key = (nonzeros(&x), nonzeros(&y));
            if last_polished.as_ref() != Some(&key) {
                let polished = self.polish(&x, &y);
                last_polished = Some(key);
                if let Some((xp, yp)) = polished {
                    let pc = self.certify(&xp, &self.k(&xp), &yp, &self.kt(&yp), tol);
                    if pc.ok {
                        return Ok(self.outcome(xp, iter, &pc));
                    }
                }
            }

            let x_avg = &x_sum / since_restart as f64;
            let y_avg = &y_sum / since_restart as f64;
            let (kx_avg, kty_avg) = (self.k(&x_avg), self.kt(&y_avg));
            let current_error = self.kkt_error(&x, &kx, &y, &kty);
            let average_error = self.kkt_error(&x_avg, &kx_avg, &y_avg, &kty_avg);
            let use_average = average_error < current_error;
            let candidate = current_error.min(average_error);
            let restart = candidate <= RESTART_SUFFICIENT * anchor_error
                || (candidate <= RESTART_NECESSARY * anchor_error && candidate > previous_candidate)
                || since_restart as f64 >= RESTART_ARTIFICIAL * iter as f64;
            previous_candidate = candidate;
            if !restart {
                continue;
            }
            if use_average {
                (x, y, kx, kty) = (x_avg, y_avg, kx_avg, kty_avg);
            }
            let dx = (&x - &anchor.0).norm();
            let dy = (&y - &anchor.1).norm();
            if dx > 1e-10 && dy > 1e-10 {
                omega = (0.5 * (dy / dx).ln() + 0.5 * omega.ln()).exp();
            }
            anchor = (x.clone(), y.clone());
            anchor_error = candidate;
            previous_candidate = f64::INFINITY;
            x_sum.fill(0.0);
            y_sum.fill(0.0);
            since_restart = 0;
        }
        finish(self.outcome(x, cfg.max_iterations, &cert))
    }

    /// Candidate primal–dual pair from the optimality system on the current
    /// supports of `x` and `y`.
    fn polish(&self, x: &Vector, y: &Vector) -> Option<(Vector, Vector)> {
        let n = x.len();
        let support = nonzeros(x);
        if support.is_empty() {
            return Some((Vector::zeros(n), Vector::zeros(self.target.len())));
        }
        match self.kind {
            Kind::Bp => {
                if support.len() > self.a.nrows() {
                    return None;
                }
                let a_s = columns(self.a, &support);
                let x_s = lstsq(&a_s, self.b)?;
                let signs = x_s.map(sign);
                let dual = lstsq(&a_s.transpose(), &(-signs))?;
                Some((scatter(n, &support, &x_s), dual))
            }
            Kind::Qcbp { eta } => {
                if support.len() > self.a.nrows() {
                    return None;
                }
                let a_s = columns(self.a, &support);
                let signs = gather(x, &support).map(sign);
                let x_ls = lstsq(&a_s, self.b)?;
                let p_perp = self.b - &a_s * &x_ls;
                let u = lstsq(&(a_s.transpose() * &a_s), &signs)?;
                let w = &a_s * &u;
                let radicand = eta * eta - p_perp.norm_squared();
                let wn = w.norm();
                if radicand <= 0.0 || wn == 0.0 {
                    return None;
                }
                let c = radicand.sqrt() / wn;
                let x_s = x_ls - u * c;
                let dual = (&a_s * &x_s - self.b) / c;
                Some((scatter(n, &support, &x_s), dual))
            }
            Kind::Dantzig { eta } => {
                let active = nonzeros(y);
                if active.is_empty() {
                    return None;
                }
                let g = self.gram.as_ref()?;
                let g_ts = g.select_rows(active.iter()).select_columns(support.iter());
                let t_signs = gather(y, &active).map(sign);
                let rhs = gather(&self.target, &active) + t_signs * eta;
                let x_s = lstsq(&g_ts, &rhs)?;
                let signs = x_s.map(sign);
                let y_t = lstsq(&g_ts.transpose(), &(-signs))?;
                Some((scatter(n, &support, &x_s), scatter(n, &active, &y_t)))
            }
        }
    }
}

fn nonzeros(v: &Vector) -> Vec<usize> {
    (0..v.len()).filter(|&j| v[j] != 0.0).collect()
}
