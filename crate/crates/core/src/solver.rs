//! Preconditioned conjugate gradients for the SPD systems of the scheme.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Preconditioner {
    None,
    #[default]
    Jacobi,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Relative residual target `‖Ax - b‖ / ‖b‖`.
    pub tol: f64,
    /// `None` means `10 n`.
    pub max_iter: Option<usize>,
    pub preconditioner: Preconditioner,
    /// Start time steps from the previous state instead of zero.
    pub warm_start: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: None, preconditioner: Preconditioner::Jacobi, warm_start: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_relative_residual: f64,
    pub converged: bool,
    /// `sqrt(rᵀ z)` per iteration, starting with the initial residual.
    pub preconditioned_residuals: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = rhs` from a zero initial guess.
pub fn cg_solve(a: &SparseMatrix, rhs: &[f64], tol: f64, max_iter: usize, preconditioner: Preconditioner) -> Result<(Vec<f64>, SolveReport)> {
    cg_solve_from(a, rhs, vec![0.0; rhs.len()], tol, max_iter, preconditioner)
}

/// Solves `A x = rhs` starting from `x0`.
pub fn cg_solve_from(
    a: &SparseMatrix,
    rhs: &[f64],
    x0: Vec<f64>,
    tol: f64,
    max_iter: usize,
    preconditioner: Preconditioner,
) -> Result<(Vec<f64>, SolveReport)> {
    let n = a.n();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rhs.len() });
    }
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    let inv_diag: Vec<f64> = match preconditioner {
        Preconditioner::None => vec![1.0; n],
        Preconditioner::Jacobi => a
            .diagonal()
            .into_iter()
            .map(|d| if d > 0.0 && d.is_finite() { 1.0 / d } else { 1.0 })
            .collect(),
    };
    let bnorm = norm(rhs);
    let mut x = x0;
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        let report = SolveReport { iterations: 0, final_relative_residual: 0.0, converged: true, preconditioned_residuals: vec![0.0] };
        return Ok((x, report));
    }

    let mut r = a.mul_vec(&x);
    r.iter_mut().zip(rhs).for_each(|(ri, bi)| *ri = bi - *ri);
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, d)| ri * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut history = vec![rz.max(0.0).sqrt()];
    let mut rel = norm(&r) / bnorm;
    let mut it = 0;
    while rel > tol && it < max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !pap.is_finite() || pap <= 0.0 {
            return Err(Error::NonFinite { iteration: it });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        if !rz_new.is_finite() {
            return Err(Error::NonFinite { iteration: it });
        }
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        it += 1;
        rel = norm(&r) / bnorm;
        history.push(rz.max(0.0).sqrt());
    }
    let report = SolveReport { iterations: it, final_relative_residual: rel, converged: rel <= tol, preconditioned_residuals: history };
    Ok((x, report))
}

/// [`cg_solve`] with [`SolverOptions`]; non-convergence is an error.
pub fn solve(a: &SparseMatrix, rhs: &[f64], x0: Option<Vec<f64>>, opts: &SolverOptions) -> Result<(Vec<f64>, SolveReport)> {
    let max_iter = opts.max_iter.unwrap_or(10 * a.n());
    let x0 = x0.unwrap_or_else(|| vec![0.0; rhs.len()]);
    let (x, report) = cg_solve_from(a, rhs, x0, opts.tol, max_iter, opts.preconditioner)?;
    if !report.converged {
        return Err(Error::NotConverged { iterations: report.iterations, residual: report.final_relative_residual });
    }
    Ok((x, report))
}
