//! Small dense helpers shared by the solvers and property checks.

use crate::{Matrix, Vector};

pub(crate) fn norm1(v: &Vector) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub(crate) fn norm_inf(v: &Vector) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub(crate) fn count_nonzero(v: &Vector) -> usize {
    v.iter().filter(|x| **x != 0.0).count()
}

pub(crate) fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Columns of `a` listed in `cols`, in order.
pub(crate) fn columns(a: &Matrix, cols: &[usize]) -> Matrix {
    Matrix::from_fn(a.nrows(), cols.len(), |i, j| a[(i, cols[j])])
}

/// Entries of `v` listed in `idx`, in order.
pub(crate) fn gather(v: &Vector, idx: &[usize]) -> Vector {
    Vector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]))
}

/// Dense length-`n` vector with `vals[k]` placed at `idx[k]`.
pub(crate) fn scatter(n: usize, idx: &[usize], vals: &Vector) -> Vector {
    let mut out = Vector::zeros(n);
    for (k, &i) in idx.iter().enumerate() {
        out[i] = vals[k];
    }
    out
}

/// Extreme eigenvalues of a symmetric matrix; the input is symmetrized first.
pub(crate) fn symmetric_eig_range(g: &Matrix) -> (f64, f64) {
    let sym = (g + g.transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    let lo = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Least-squares / minimum-norm solution of `a x = b` through the SVD.
pub(crate) fn lstsq(a: &Matrix, b: &Vector) -> Option<Vector> {
    if a.ncols() == 0 {
        return Some(Vector::zeros(0));
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * 1e-12 * (a.nrows().max(a.ncols()) as f64);
    svd.solve(b, eps).ok()
}

/// Largest eigenvalue of `AᵀA` by power iteration from the all-ones vector.
pub(crate) fn power_iteration_lipschitz(a: &Matrix, iterations: usize, rel_tol: f64) -> f64 {
    let n = a.ncols();
    let mut v = Vector::from_element(n, 1.0);
    if (a * &v).norm() < 1e-14 * (n as f64).sqrt() {
        // all-ones lies in the null space; use a fixed non-symmetric start
        v = Vector::from_fn(n, |i, _| 1.0 + i as f64 / n as f64);
    }
    let mut estimate = 0.0;
    for _ in 0..iterations {
        let norm = v.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v /= norm;
        let w = a.transpose() * (a * &v);
        let next = v.dot(&w);
        v = w;
        let done = (next - estimate).abs() <= rel_tol * next.abs();
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}
