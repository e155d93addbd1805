//! Initial projection, stationary solve and the backward Euler loop
//!
//! ```text
//! (M + Δt 𝒜_h) u^{k+1} = M u^k + Δt F(t_{k+1})
//! ```
//!
//! with `M = M_Ω + λ M_{Γ1}` and `F` the load (plus the Nitsche datum terms
//! in Dirichlet mode).

use nalgebra::{DMatrix, DVector};

use crate::assembly::{assemble_dirichlet_rhs, assemble_load, assemble_mass, Discretization, Operators};
use crate::error::{Error, Result};
use crate::manufactured::Sources;
use crate::mesh::{BcMode, Point};
use crate::solver::{solve, SolveReport, SolverOptions};

/// Plain `L²(Ω)` projection onto `V^p`, element by element.
pub fn l2_project(disc: &Discretization, u0: &dyn Fn(Point) -> f64) -> Result<Vec<f64>> {
    let space = &disc.space;
    let n = space.n_local;
    let mut reference = DMatrix::<f64>::zeros(n, n);
    let mut sc = space.scratch();
    for (xi, w) in space.operator_rule.iter() {
        space.basis.eval_into(*xi, &mut sc.values, &mut sc.grads);
        for i in 0..n {
            for j in 0..n {
                reference[(i, j)] += w * sc.values[i] * sc.values[j];
            }
        }
    }
    let chol = reference.cholesky().ok_or(Error::SingularMass(0))?;
    let mut out = vec![0.0; space.n_dofs()];
    for t in 0..space.n_elements {
        let geo = &space.geometry[t];
        let jac = geo.det.abs();
        if !(jac > 0.0) {
            return Err(Error::SingularMass(t));
        }
        let mut rhs = DVector::<f64>::zeros(n);
        for (xi, w) in space.data_rule.iter() {
            space.basis.eval_into(*xi, &mut sc.values, &mut sc.grads);
            let f = u0(geo.to_physical(*xi));
            for i in 0..n {
                rhs[i] += w * f * sc.values[i];
            }
        }
        // the Jacobian cancels between the local mass and the load
        let c = chol.solve(&rhs);
        out[space.dofs(t)].copy_from_slice(c.as_slice());
    }
    Ok(out)
}

/// Projection orthogonal in `L²_λ(Ω, Γ1)`: the weighted mass `M_Ω + λ M_{Γ1}`
/// is block diagonal, so this is also solved element by element.
pub fn l2_lambda_project(disc: &Discretization, lambda: f64, u0: &dyn Fn(Point) -> f64) -> Result<Vec<f64>> {
    let mass = assemble_mass(disc, lambda);
    let rhs = assemble_load(disc, u0, &|x, _| lambda * u0(x));
    let space = &disc.space;
    let n = space.n_local;
    let mut out = vec![0.0; space.n_dofs()];
    for t in 0..space.n_elements {
        let o = space.dof_offset(t);
        let block = DMatrix::from_fn(n, n, |i, j| mass.get(o + i, o + j));
        let chol = block.cholesky().ok_or(Error::SingularMass(t))?;
        let c = chol.solve(&DVector::from_column_slice(&rhs[o..o + n]));
        out[o..o + n].copy_from_slice(c.as_slice());
    }
    Ok(out)
}

/// How the initial coefficients are obtained from `u0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InitialProjection {
    /// Orthogonal in `L²(Ω)` only.
    Domain,
    /// Orthogonal in `L²_λ(Ω, Γ1)`.
    #[default]
    Lambda,
}

impl InitialProjection {
    pub fn apply(self, disc: &Discretization, lambda: f64, u0: &dyn Fn(Point) -> f64) -> Result<Vec<f64>> {
        match self {
            Self::Domain => l2_project(disc, u0),
            Self::Lambda => l2_lambda_project(disc, lambda, u0),
        }
    }
}

impl std::str::FromStr for InitialProjection {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "domain" => Ok(Self::Domain),
            "lambda" => Ok(Self::Lambda),
            _ => Err(format!("unknown projection `{s}` (domain or lambda)")),
        }
    }
}

impl std::fmt::Display for InitialProjection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Domain => "domain",
            Self::Lambda => "lambda",
        })
    }
}

/// Right-hand side `F(t)`: load plus Dirichlet datum terms.
pub fn source_vector(disc: &Discretization, ops: &Operators, sources: &dyn Sources, t: f64) -> Result<Vec<f64>> {
    let mut rhs = assemble_load(disc, &|x| sources.f(t, x), &|x, s| sources.g(t, x, s));
    if disc.bc_mode() == BcMode::DirichletLateral {
        let d = assemble_dirichlet_rhs(disc, &ops.params, &|x| sources.dirichlet(t, x))?;
        rhs.iter_mut().zip(d).for_each(|(a, b)| *a += b);
    }
    Ok(rhs)
}

/// Solves `𝒜_h u = F(t)`. Fails if constants lie in the kernel of the
/// operator (no `α` term with periodic lateral sides).
pub fn solve_stationary(disc: &Discretization, ops: &Operators, sources: &dyn Sources, t: f64, opts: &SolverOptions) -> Result<(Vec<f64>, SolveReport)> {
    let ones = vec![1.0; disc.n_dofs()];
    let a1 = ops.system.mul_vec(&ones);
    let scale = ops.system.max_abs();
    if a1.iter().all(|v| v.abs() <= 1e-12 * scale) {
        return Err(Error::SingularOperator);
    }
    let rhs = source_vector(disc, ops, sources, t)?;
    solve(&ops.system, &rhs, None, opts)
}

/// Number of steps `K = T / Δt`; must be integral within `1e-9`.
pub fn step_count(dt: f64, t_final: f64) -> Result<usize> {
    if !(dt > 0.0) {
        return Err(Error::InvalidTimeStep(dt));
    }
    let k = t_final / dt;
    if (k - k.round()).abs() > 1e-9 || k.round() < 0.0 {
        return Err(Error::NonIntegralSteps(k));
    }
    Ok(k.round() as usize)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_final: f64,
}

/// What the loop reports to its observer after each step.
pub struct StepState<'a> {
    pub k: usize,
    pub t: f64,
    pub state: &'a [f64],
    pub report: &'a SolveReport,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub final_state: Vec<f64>,
    pub steps: usize,
    /// `‖u_h^k‖_{L²_λ}` for `k = 0..=K`.
    pub l2_lambda_norms: Vec<f64>,
    pub total_iterations: usize,
    /// All states `u^0..u^K` when requested.
    pub trajectory: Option<Vec<Vec<f64>>>,
}

fn mass_norm(ops: &Operators, u: &[f64]) -> f64 {
    ops.mass.bilinear(u, u).max(0.0).sqrt()
}

/// Backward Euler from the coefficient vector `u0`, with sources evaluated
/// at the new time level `t_{k+1}`.
pub fn run_backward_euler(
    disc: &Discretization,
    ops: &Operators,
    sources: &dyn Sources,
    u0: Vec<f64>,
    time: TimeConfig,
    opts: &SolverOptions,
    keep_trajectory: bool,
    observer: &mut dyn FnMut(StepState<'_>),
) -> Result<RunOutcome> {
    let steps = step_count(time.dt, time.t_final)?;
    if u0.len() != disc.n_dofs() {
        return Err(Error::DimensionMismatch { expected: disc.n_dofs(), got: u0.len() });
    }
    let dt = time.dt;
    let lhs = ops.mass.add_scaled(dt, &ops.system);
    let mut u = u0;
    let mut norms = Vec::with_capacity(steps + 1);
    norms.push(mass_norm(ops, &u));
    let mut trajectory = keep_trajectory.then(|| vec![u.clone()]);
    let mut total_iterations = 0;
    for k in 0..steps {
        let t_next = (k + 1) as f64 * dt;
        let mut rhs = ops.mass.mul_vec(&u);
        let f = source_vector(disc, ops, sources, t_next).map_err(|e| Error::StepFailed { step: k + 1, source: Box::new(e) })?;
        rhs.iter_mut().zip(&f).for_each(|(r, fi)| *r += dt * fi);
        let x0 = opts.warm_start.then(|| u.clone());
        let (next, report) = solve(&lhs, &rhs, x0, opts).map_err(|e| Error::StepFailed { step: k + 1, source: Box::new(e) })?;
        total_iterations += report.iterations;
        u = next;
        norms.push(mass_norm(ops, &u));
        if let Some(tr) = trajectory.as_mut() {
            tr.push(u.clone());
        }
        observer(StepState { k: k + 1, t: t_next, state: &u, report: &report });
    }
    Ok(RunOutcome { final_state: u, steps, l2_lambda_norms: norms, total_iterations, trajectory })
}
