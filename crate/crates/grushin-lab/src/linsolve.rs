//! Jacobi-preconditioned conjugate gradients for the assembled SPD systems.
//!
//! Deterministic by construction: fixed iteration order, no randomized
//! restarts, plain sequential reductions. Two calls with identical inputs
//! produce bit-identical outputs.

use thiserror::Error;

use crate::operator::{Field, OperatorError, SparseOperator};

/// Default relative residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default iteration cap: `ceil(20 * sqrt(dim))`.
pub fn default_maxiter(dim: usize) -> usize {
    (20.0 * (dim as f64).sqrt()).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSolveStats {
    pub iterations: usize,
    /// Euclidean norm of `b - A x`, relative to `||b||`.
    pub final_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum LinSolveError {
    #[error("conjugate gradients did not converge: {} iterations, relative residual {:.3e}", .stats.iterations, .stats.final_residual)]
    NotConverged { stats: LinearSolveStats },
    #[error("conjugate gradients broke down: <p, Ap> = {0:.3e} not positive")]
    Breakdown(f64),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve `A x = b` for the interior values of `rhs` by Jacobi-preconditioned
/// CG. The returned field is a Dirichlet field. `init`, when given, is the
/// warm-start iterate. Convergence means the recomputed true residual
/// satisfies `||b - A x|| <= tol * ||b||`; non-convergence after `maxiter`
/// is an explicit failure carrying the stats.
pub fn solve_spd(
    op: &SparseOperator,
    rhs: &Field,
    tol: f64,
    maxiter: usize,
    init: Option<&Field>,
) -> Result<(Field, LinearSolveStats), LinSolveError> {
    if !(tol > 0.0) {
        return Err(LinSolveError::BadTolerance(tol));
    }
    if rhs.grid() != op.grid() {
        return Err(OperatorError::GridMismatch.into());
    }
    let n = op.dim();
    let b = rhs.interior_vec();
    let b_norm = norm2(&b);
    if b_norm == 0.0 {
        let stats = LinearSolveStats { iterations: 0, final_residual: 0.0, converged: true };
        return Ok((Field::zeros(op.grid()), stats));
    }

    let mut x = match init {
        Some(f) => {
            if f.grid() != op.grid() {
                return Err(OperatorError::GridMismatch.into());
            }
            f.interior_vec()
        }
        None => vec![0.0; n],
    };

    let diag = op.diagonal();
    let inv_diag: Vec<f64> = diag.iter().map(|&d| 1.0 / d).collect();

    let mut r = vec![0.0; n];
    op.matvec(&x, &mut r);
    for k in 0..n {
        r[k] = b[k] - r[k];
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut iterations = 0usize;

    let true_residual = |x: &[f64], scratch: &mut Vec<f64>| -> f64 {
        op.matvec(x, scratch);
        let mut acc = 0.0;
        for k in 0..n {
            let d = b[k] - scratch[k];
            acc += d * d;
        }
        acc.sqrt() / b_norm
    };

    let mut scratch = vec![0.0; n];
    let mut rel = true_residual(&x, &mut scratch);
    if rel <= tol {
        let stats = LinearSolveStats { iterations: 0, final_residual: rel, converged: true };
        return Ok((Field::from_interior_vec(op.grid(), &x), stats));
    }

    while iterations < maxiter {
        op.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(LinSolveError::Breakdown(pap));
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
        }
        for k in 0..n {
            r[k] -= alpha * ap[k];
        }
        iterations += 1;

        if norm2(&r) <= tol * b_norm {
            // guard against recurrence drift before declaring victory
            rel = true_residual(&x, &mut scratch);
            if rel <= tol {
                let stats =
                    LinearSolveStats { iterations, final_residual: rel, converged: true };
                return Ok((Field::from_interior_vec(op.grid(), &x), stats));
            }
            // refresh the recurrence from the true residual and continue
            for k in 0..n {
                r[k] = b[k] - scratch[k];
            }
            z.iter_mut().zip(&r).zip(&inv_diag).for_each(|((zi, ri), di)| *zi = ri * di);
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }

        for k in 0..n {
            z[k] = r[k] * inv_diag[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }

    rel = true_residual(&x, &mut scratch);
    let stats = LinearSolveStats { iterations, final_residual: rel, converged: rel <= tol };
    if stats.converged {
        Ok((Field::from_interior_vec(op.grid(), &x), stats))
    } else {
        Err(LinSolveError::NotConverged { stats })
    }
}
