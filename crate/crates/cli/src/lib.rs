//! Command-line front end: configuration handling and study runners that
//! render their results as CSV or markdown tables.

pub mod config;

use std::fs;
use std::io::BufWriter;

use anyhow::{Context, Result};
use dgdyn::errors::l2_errors;
use dgdyn::report::{converge_dt_table, converge_h_table, sci, stability_table, Table};
use dgdyn::study::{halving_steps, run_converge_dt, run_converge_h, run_stability};
use dgdyn::{run_backward_euler, solve_stationary, Operators, RunSettings, SolverOptions, Stationary, TimeConfig};

pub use config::{parse_config_text, Case, Levels, Mode, ProblemConfig};

pub const SOLVE_HEADER: [&str; 8] = ["level", "h", "dt", "steps", "cg_iterations", "l2_domain", "l2_gamma1", "l2_lambda"];

pub fn settings(cfg: &ProblemConfig) -> RunSettings {
    RunSettings {
        gamma: cfg.gamma,
        penalty_mode: cfg.penalty_mode,
        projection: cfg.projection,
        threads: cfg.threads,
        ..RunSettings::new(cfg.manufactured(), cfg.p, cfg.dt, cfg.t_final)
    }
}

/// The finest configured level, used by single-level modes.
fn single_level(cfg: &ProblemConfig) -> u32 {
    *cfg.levels.0.last().expect("levels are non-empty")
}

/// Runs the configured study and returns its table.
pub fn run(cfg: &ProblemConfig) -> Result<Table> {
    let s = settings(cfg);
    let table = match cfg.mode {
        Mode::Steady | Mode::Transient => solve(cfg, &s)?,
        Mode::ConvergeH => converge_h_table(&run_converge_h(&s, &cfg.levels.0)?),
        Mode::ConvergeDt => converge_dt_table(&run_converge_dt(&s, single_level(cfg), &halving_steps(cfg.dt, cfg.dt_count))?),
        Mode::Stability => {
            let case = s.case;
            stability_table(&run_stability(&s, single_level(cfg), &|x| case.initial(x))?)
        }
    };
    Ok(table)
}

/// Single solve at the finest level. The steady mode solves the stationary
/// problem whose exact solution is the manufactured one frozen at `t_final`.
fn solve(cfg: &ProblemConfig, s: &RunSettings) -> Result<Table> {
    let level = single_level(cfg);
    let disc = s.discretization(level)?;
    let ops = Operators::assemble(&disc, s.params(disc.h())?)?;
    if let Some(path) = &cfg.dump_matrix {
        let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        ops.system.write_text(BufWriter::new(f))?;
    }
    let case = s.case;
    let opts = SolverOptions::default();
    let (state, t, dt, steps, iterations) = match cfg.mode {
        Mode::Steady => {
            let (u, rep) = solve_stationary(&disc, &ops, &Stationary { case, t: cfg.t_final }, cfg.t_final, &opts)?;
            (u, cfg.t_final, String::new(), String::new(), rep.iterations)
        }
        _ => {
            let u0 = s.projection.apply(&disc, case.lambda, &|x| case.initial(x))?;
            let time = TimeConfig { dt: cfg.dt, t_final: cfg.t_final };
            let out = run_backward_euler(&disc, &ops, &case, u0, time, &opts, false, &mut |_| {})?;
            let t = out.steps as f64 * cfg.dt;
            (out.final_state, t, sci(cfg.dt), out.steps.to_string(), out.total_iterations)
        }
    };
    let e = l2_errors(&disc, case.lambda, &state, &|x| case.u(t, x));
    let row = vec![level.to_string(), sci(disc.h()), dt, steps, iterations.to_string(), sci(e.domain), sci(e.gamma1), sci(e.lambda)];
    Ok(Table { header: SOLVE_HEADER.to_vec(), rows: vec![row] })
}
