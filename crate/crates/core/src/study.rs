//! Convergence and stability studies built on the transient solver.

use std::thread;

use crate::assembly::{Discretization, FormParams, Operators, PenaltyMode};
use crate::error::{Error, Result};
use crate::errors::{attach_rates, energy_norm, l2_errors, BrokenFunction, ErrorRecord};
use crate::manufactured::{ManufacturedCase, ZeroSources};
use crate::mesh::{Point, Rectangle};
use crate::solver::SolverOptions;
use crate::timestepper::{run_backward_euler, InitialProjection, TimeConfig};

/// Everything a single manufactured-solution run needs besides the level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSettings {
    pub case: ManufacturedCase,
    pub p: usize,
    pub gamma: f64,
    pub penalty_mode: PenaltyMode,
    pub dt: f64,
    pub t_final: f64,
    pub solver: SolverOptions,
    pub projection: InitialProjection,
    /// Worker threads for independent levels or time steps; `1` runs inline.
    pub threads: usize,
}

impl RunSettings {
    pub fn new(case: ManufacturedCase, p: usize, dt: f64, t_final: f64) -> Self {
        Self { case, p, gamma: 10.0, penalty_mode: PenaltyMode::GammaOverH, dt, t_final, solver: SolverOptions::default(), projection: InitialProjection::default(), threads: 1 }
    }

    pub fn params(&self, h: f64) -> Result<FormParams> {
        let c = &self.case;
        FormParams::new(c.alpha, c.beta, c.lambda, self.gamma, h, self.penalty_mode)
    }

    pub fn discretization(&self, level: u32) -> Result<Discretization> {
        Discretization::new(level, Rectangle::unit_square(), self.p, self.case.bc_mode)
    }
}

/// Transient run at one level: final `L²(Ω)`, `L²(Γ1)` errors and the
/// accumulated energy error `(Δt Σ_k |||u(t_k) − u_h^k|||²)^{1/2}`.
pub fn run_case(settings: &RunSettings, level: u32) -> Result<ErrorRecord> {
    let disc = settings.discretization(level)?;
    let params = settings.params(disc.h())?;
    let ops = Operators::assemble(&disc, params)?;
    let case = settings.case;
    let u0 = settings.projection.apply(&disc, case.lambda, &|x| case.initial(x))?;
    let time = TimeConfig { dt: settings.dt, t_final: settings.t_final };
    let mut energy_sum = 0.0;
    let out = run_backward_euler(&disc, &ops, &case, u0, time, &settings.solver, false, &mut |s| {
        let t = s.t;
        let exact = move |x: Point| (case.u(t, x), case.grad_u(t, x));
        let e = energy_norm(&disc, &params, BrokenFunction::difference(&exact, s.state));
        energy_sum += e * e;
    })?;
    let t_end = out.steps as f64 * settings.dt;
    let l2 = l2_errors(&disc, case.lambda, &out.final_state, &|x| case.u(t_end, x));
    Ok(ErrorRecord::new(disc.h(), settings.dt, l2.domain, l2.gamma1, (settings.dt * energy_sum).sqrt()))
}

/// Maps `job` over `items` on up to `threads` workers, keeping input order.
fn ordered_map<T: Sync, R: Send>(items: &[T], threads: usize, job: impl Fn(&T) -> Result<R> + Sync) -> Result<Vec<R>> {
    if threads <= 1 || items.len() <= 1 {
        return items.iter().map(&job).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let results: Vec<Vec<Result<R>>> = thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&job).collect::<Vec<_>>())).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    results.into_iter().flatten().collect()
}

/// One run per level, rates against the previous level (`h` halves).
pub fn run_converge_h(settings: &RunSettings, levels: &[u32]) -> Result<Vec<ErrorRecord>> {
    let mut rows = ordered_map(levels, settings.threads, |&l| run_case(settings, l))?;
    attach_rates(&mut rows, 2.0);
    Ok(rows)
}

/// `Δt_j = dt0 · 2^{−j}` for `j = 0..count`.
pub fn halving_steps(dt0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| dt0 / f64::powi(2.0, j as i32)).collect()
}

/// Fixed level, one run per time step, rates against the previous step.
pub fn run_converge_dt(settings: &RunSettings, level: u32, dts: &[f64]) -> Result<Vec<ErrorRecord>> {
    let mut rows = ordered_map(dts, settings.threads, |&dt| run_case(&RunSettings { dt, ..*settings }, level))?;
    for i in 1..rows.len() {
        let factor = rows[i - 1].dt / rows[i].dt;
        let prev = rows[i - 1];
        rows[i] = rows[i].with_rates_from(&prev, factor);
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityRow {
    pub k: usize,
    pub t: f64,
    pub l2_lambda: f64,
}

/// Relative slack allowed on `‖u^{k+1}‖ ≤ ‖u^k‖` for solver round-off.
pub const STABILITY_SLACK: f64 = 1e-10;

/// Zero-source run from `u0`; fails on the first step whose `L²_λ` norm
/// grows beyond round-off.
pub fn run_stability(settings: &RunSettings, level: u32, u0: &dyn Fn(Point) -> f64) -> Result<Vec<StabilityRow>> {
    let disc = settings.discretization(level)?;
    let ops = Operators::assemble(&disc, settings.params(disc.h())?)?;
    let c0 = settings.projection.apply(&disc, settings.case.lambda, u0)?;
    let time = TimeConfig { dt: settings.dt, t_final: settings.t_final };
    let out = run_backward_euler(&disc, &ops, &ZeroSources, c0, time, &settings.solver, false, &mut |_| {})?;
    let norms = out.l2_lambda_norms;
    for k in 1..norms.len() {
        let (before, after) = (norms[k - 1], norms[k]);
        if after > before * (1.0 + STABILITY_SLACK) {
            return Err(Error::StabilityViolation { step: k, before, after });
        }
    }
    Ok(norms.iter().enumerate().map(|(k, &n)| StabilityRow { k, t: k as f64 * settings.dt, l2_lambda: n }).collect())
}
