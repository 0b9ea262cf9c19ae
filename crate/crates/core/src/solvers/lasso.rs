use nalgebra::Cholesky;

use super::{check_rhs, finish, soft_threshold, SolveError, SolveOutcome, SolverConfig, StepRule};
use crate::linalg::{columns, gather, norm1, norm_inf, power_iteration_lipschitz, scatter, sign};
use crate::measurement::MeasurementMatrix;
use crate::{Matrix, Vector};

const POWER_ITERATIONS: usize = 30;
const POWER_TOL: f64 = 1e-10;
// Power iteration approaches ‖A‖² from below.
const LIPSCHITZ_MARGIN: f64 = 1.01;
const CHECK_EVERY: usize = 10;

/// Lasso solve with certified KKT conditions.
pub fn solve_lasso(
    m: &MeasurementMatrix,
    b: &Vector,
    lambda: f64,
    cfg: &SolverConfig,
) -> Result<SolveOutcome, SolveError> {
    solve_lasso_observed(m, b, lambda, cfg, &mut |_, _| {})
}

/// As [`solve_lasso`], reporting `(iteration, objective)` of the accepted
/// iterate after every step.
pub fn solve_lasso_observed(
    m: &MeasurementMatrix,
    b: &Vector,
    lambda: f64,
    cfg: &SolverConfig,
    observer: &mut dyn FnMut(usize, f64),
) -> Result<SolveOutcome, SolveError> {
    cfg.validate()?;
    check_rhs(m.m(), b)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(SolveError::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let a = m.entries();
    let problem = Lasso { a, b, lambda };
    let estimate = power_iteration_lipschitz(a, POWER_ITERATIONS, POWER_TOL);
    let mut lip = match cfg.step_rule {
        StepRule::FixedLipschitz => estimate * LIPSCHITZ_MARGIN,
        StepRule::Backtracking => estimate * 0.25,
    };
    if lip <= 0.0 {
        lip = 1.0;
    }

    let n = a.ncols();
    let mut x = Vector::zeros(n);
    let mut obj_x = problem.objective_from(&x, &Vector::zeros(a.nrows()));
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut last_polished: Option<Vec<usize>> = None;

    if let Some(done) = problem.certify_or_polish(&x, &mut last_polished, cfg.tolerance, 0) {
        return Ok(done);
    }

    for iter in 1..=cfg.max_iterations {
        let ay = a * &y;
        let r_y = &ay - b;
        let grad = a.transpose() * &r_y;
        let f_y = 0.5 * r_y.norm_squared();
        let (z, az) = loop {
            let z = soft_threshold(&(&y - &grad / lip), lambda / lip);
            let az = a * &z;
            if cfg.step_rule == StepRule::FixedLipschitz {
                break (z, az);
            }
            let d = &z - &y;
            let f_z = 0.5 * (&az - b).norm_squared();
            if f_z <= f_y + grad.dot(&d) + 0.5 * lip * d.norm_squared() + 1e-15 * f_y.abs() {
                break (z, az);
            }
            lip *= 2.0;
        };
        let obj_z = problem.objective_from(&z, &az);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let x_prev = x.clone();
        if obj_z <= obj_x {
            y = &z + (&z - &x_prev) * ((t - 1.0) / t_next);
            x = z;
            obj_x = obj_z;
            t = t_next;
        } else {
            // monotone step: keep x, restart momentum from it
            y = &x + (&z - &x) * (t / t_next);
            t = 1.0;
        }
        observer(iter, obj_x);

        if iter % CHECK_EVERY == 0 || iter == cfg.max_iterations {
            if let Some(done) = problem.certify_or_polish(&x, &mut last_polished, cfg.tolerance, iter) {
                return Ok(done);
            }
        }
    }
    let kkt = lasso_kkt_residual(a, b, lambda, &x, cfg.tolerance);
    finish(SolveOutcome {
        objective: obj_x,
        estimate: x,
        iterations: cfg.max_iterations,
        converged: false,
        primal_residual: 0.0,
        optimality_residual: kkt,
    })
}

/// Worst violation of the Lasso subgradient conditions, relative to λ:
/// `‖Aᵀ(Ax−b)‖∞ ≤ λ` everywhere and `(Aᵀ(b−Ax))_j = λ·sign(x_j)` wherever
/// `|x_j| > support_tol`.
pub fn lasso_kkt_residual(a: &Matrix, b: &Vector, lambda: f64, x: &Vector, support_tol: f64) -> f64 {
    let corr = a.transpose() * (b - a * x);
    let mut worst = (norm_inf(&corr) - lambda).max(0.0) / lambda;
    for j in 0..x.len() {
        if x[j].abs() > support_tol {
            worst = worst.max((corr[j] - lambda * sign(x[j])).abs() / lambda);
        }
    }
    worst
}

struct Lasso<'a> {
    a: &'a Matrix,
    b: &'a Vector,
    lambda: f64,
}

impl Lasso<'_> {
    fn objective_from(&self, x: &Vector, ax: &Vector) -> f64 {
        self.lambda * norm1(x) + 0.5 * (ax - self.b).norm_squared()
    }

    fn outcome(&self, x: Vector, iterations: usize, kkt: f64) -> SolveOutcome {
        let ax = self.a * &x;
        SolveOutcome {
            objective: self.objective_from(&x, &ax),
            estimate: x,
            iterations,
            converged: true,
            primal_residual: 0.0,
            optimality_residual: kkt,
        }
    }

    fn certify_or_polish(
        &self,
        x: &Vector,
        last_polished: &mut Option<Vec<usize>>,
        tol: f64,
        iterations: usize,
    ) -> Option<SolveOutcome> {
        let kkt = lasso_kkt_residual(self.a, self.b, self.lambda, x, tol);
        if kkt <= tol {
            return Some(self.outcome(x.clone(), iterations, kkt));
        }
        let support: Vec<usize> = (0..x.len()).filter(|&j| x[j] != 0.0).collect();
        if last_polished.as_ref() == Some(&support) {
            return None;
        }
        let candidate = self.polish(x, &support);
        *last_polished = Some(support);
        let candidate = candidate?;
        let kkt = lasso_kkt_residual(self.a, self.b, self.lambda, &candidate, tol);
        (kkt <= tol).then(|| self.outcome(candidate, iterations, kkt))
    }

    // Solve A_SᵀA_S x_S = A_Sᵀb − λ·sign(x_S) on the current support.
    fn polish(&self, x: &Vector, support: &[usize]) -> Option<Vector> {
        let n = x.len();
        if support.is_empty() {
            return Some(Vector::zeros(n));
        }
        if support.len() > self.a.nrows() {
            return None;
        }
        let a_s = columns(self.a, support);
        let signs = gather(x, support).map(sign);
        let rhs = a_s.transpose() * self.b - &signs * self.lambda;
        let chol = Cholesky::new(a_s.transpose() * &a_s)?;
        let x_s = chol.solve(&rhs);
        if (0..support.len()).any(|k| sign(x_s[k]) != signs[k]) {
            return None;
        }
        Some(scatter(n, support, &x_s))
    }
}
