//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Tolerances are fixed here and never tuned against results.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use dgdyn::assembly::{assemble_bulk_form, assemble_surface_form};
use dgdyn::errors::{energy_norm, l2_errors, rate, BrokenFunction, ErrorRecord};
use dgdyn::manufactured::ConstantSolution;
use dgdyn::study::{halving_steps, run_case, run_converge_dt, run_converge_h, run_stability};
use dgdyn::{
    example1, example3, l2_project, run_backward_euler, solve_stationary, BcMode, Discretization, FormParams, ManufacturedCase,
    InitialProjection, Operators, PenaltyMode, Point, Rectangle, RunSettings, SolverOptions, TimeConfig,
};
use nalgebra::SymmetricEigen;

const TABLE1_LEVEL4_L2: f64 = 1.451833e-02;
const MAGNITUDE_TOL: f64 = 0.25;
const TEMPORAL_TREND: [f64; 4] = [0.85, 0.92, 0.96, 1.00];
const TEMPORAL_TOL: f64 = 0.2;
const TEMPORAL_FINAL_MIN: f64 = 0.9;
const TEMPORAL_LEVEL: u32 = 6;
const PATCH_TOL: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-12;
const KERNEL_TOL: f64 = 1e-12;
const ORACLE_TOL: f64 = 1e-10;
const INTERP_TOL: f64 = 0.15;

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(value: Option<f64>, target: f64, tol: f64) -> bool {
    value.is_some_and(|v| (v - target).abs() <= tol)
}

fn fmt_rate(r: Option<f64>) -> String {
    r.map(|r| format!("{r:.3}")).unwrap_or_else(|| "-".into())
}

fn threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8)
}

fn settings(case: ManufacturedCase, p: usize, dt: f64, t_final: f64) -> RunSettings {
    RunSettings { threads: threads(), ..RunSettings::new(case, p, dt, t_final) }
}

/// Last-pair rates against `(l2, energy)` targets; both L² norms are gated.
fn spatial(rows: &[ErrorRecord], l2: (f64, f64), energy: (f64, f64)) -> Outcome {
    let last = rows.last().expect("rows");
    let pass = within(last.rate_l2_domain, l2.0, l2.1) && within(last.rate_l2_gamma1, l2.0, l2.1) && within(last.rate_energy, energy.0, energy.1);
    let detail = format!(
        "last-pair rates L2(Omega) {} L2(Gamma1) {} energy {} (targets {:.1}±{}, {:.1}±{})",
        fmt_rate(last.rate_l2_domain),
        fmt_rate(last.rate_l2_gamma1),
        fmt_rate(last.rate_energy),
        l2.0,
        l2.1,
        energy.0,
        energy.1
    );
    Outcome { pass, detail }
}

fn table1_rows() -> Vec<ErrorRecord> {
    run_converge_h(&settings(example1(), 1, 1e-5, 1e-3), &[2, 3, 4, 5]).expect("p=1 study")
}

fn criterion_1(rows: &[ErrorRecord]) -> Outcome {
    spatial(rows, (2.0, 0.15), (1.0, 0.1))
}

fn criterion_2() -> Outcome {
    let rows = run_converge_h(&settings(example1(), 2, 1e-5, 1e-3), &[2, 3, 4]).expect("p=2 study");
    spatial(&rows, (3.0, 0.2), (2.0, 0.2))
}

fn criterion_3(rows: &[ErrorRecord]) -> Outcome {
    let over_h = rows.iter().find(|r| (r.h - 2f64.sqrt() / 16.0).abs() < 1e-12).expect("level 4 row").l2_domain;
    let fixed = run_case(&RunSettings { penalty_mode: PenaltyMode::FixedSigma, ..settings(example1(), 1, 1e-5, 1e-3) }, 4)
        .map(|r| r.l2_domain)
        .unwrap_or(f64::NAN);
    let dev = |e: f64| (e - TABLE1_LEVEL4_L2).abs() / TABLE1_LEVEL4_L2;
    // context only: the domain-orthogonal start and the best approximation in V¹ at T
    let domain_start = run_case(&RunSettings { projection: InitialProjection::Domain, ..settings(example1(), 1, 1e-5, 1e-3) }, 4)
        .map(|r| r.l2_domain)
        .unwrap_or(f64::NAN);
    let case = example1();
    let d = Discretization::new(4, Rectangle::unit_square(), 1, BcMode::Periodic).unwrap();
    let best = l2_errors(&d, 0.0, &l2_project(&d, &|x| case.u(1e-3, x)).unwrap(), &|x| case.u(1e-3, x)).domain;
    let matches: Vec<&str> = [("gamma_over_h", over_h), ("fixed_sigma", fixed)]
        .iter()
        .filter(|(_, e)| dev(*e) <= MAGNITUDE_TOL)
        .map(|(n, _)| *n)
        .collect();
    Outcome {
        pass: !matches.is_empty(),
        detail: format!(
            "level-4 L2(Omega) gamma_over_h {over_h:.6e} ({:+.1}%), fixed_sigma {fixed:.6e} ({:+.1}%), reference {TABLE1_LEVEL4_L2:.6e}; matching: {} [domain-projected start {domain_start:.6e}, best V1 approximation {best:.6e}]",
            100.0 * (over_h / TABLE1_LEVEL4_L2 - 1.0),
            100.0 * (fixed / TABLE1_LEVEL4_L2 - 1.0),
            if matches.is_empty() { "none".to_string() } else { matches.join(", ") }
        ),
    }
}

fn criterion_4() -> Outcome {
    let s = settings(example1(), 1, 0.1, 0.1);
    let rows = run_converge_dt(&s, TEMPORAL_LEVEL, &halving_steps(0.1, 5)).expect("dt study");
    let rates: Vec<Option<f64>> = rows.iter().skip(1).map(|r| r.rate_l2_domain).collect();
    let trend_ok = rates.iter().zip(TEMPORAL_TREND).all(|(r, t)| within(*r, t, TEMPORAL_TOL));
    let final_ok = rates.last().copied().flatten().is_some_and(|r| r >= TEMPORAL_FINAL_MIN);
    let shown: Vec<String> = rates.iter().map(|r| fmt_rate(*r)).collect();
    Outcome {
        pass: trend_ok && final_ok,
        detail: format!("level {TEMPORAL_LEVEL} L2(Omega) rates [{}] vs trend {:?}±{TEMPORAL_TOL}, final ≥ {TEMPORAL_FINAL_MIN}", shown.join(", "), TEMPORAL_TREND),
    }
}

fn criterion_5() -> Outcome {
    let p1 = run_converge_h(&settings(example3(), 1, 1e-3, 0.1), &[2, 3, 4, 5]).expect("p=1 Dirichlet study");
    let p2 = run_converge_h(&settings(example3(), 2, 1e-3, 0.1), &[2, 3, 4, 5]).expect("p=2 Dirichlet study");
    let a = spatial(&p1, (2.0, 0.15), (1.0, 0.1));
    let b = spatial(&p2, (3.0, 0.2), (2.0, 0.2));
    Outcome { pass: a.pass && b.pass, detail: format!("p=1 {}; p=2 {}", a.detail, b.detail) }
}

fn criterion_6() -> Outcome {
    let c = 1.7;
    let mut worst: f64 = 0.0;
    for mode in [BcMode::Periodic, BcMode::DirichletLateral] {
        let d = Discretization::new(3, Rectangle::unit_square(), 2, mode).unwrap();
        let fp = FormParams::new(2.0, 5.0, 10.0, 10.0, d.h(), PenaltyMode::GammaOverH).unwrap();
        let ops = Operators::assemble(&d, fp).unwrap();
        let src = ConstantSolution { value: c, alpha: 2.0 };
        let opts = SolverOptions::default();
        let (u, _) = solve_stationary(&d, &ops, &src, 0.0, &opts).expect("stationary");
        worst = worst.max(l2_errors(&d, 10.0, &u, &|_| c).lambda);
        let u0 = l2_project(&d, &|_| c).unwrap();
        let out = run_backward_euler(&d, &ops, &src, u0, TimeConfig { dt: 1e-2, t_final: 1.0 }, &opts, false, &mut |_| {}).expect("transient");
        assert_eq!(out.steps, 100);
        worst = worst.max(l2_errors(&d, 10.0, &out.final_state, &|_| c).lambda);
    }
    Outcome { pass: worst <= PATCH_TOL, detail: format!("max L2_lambda deviation {worst:.3e} over stationary and 100 steps, both lateral modes (tol {PATCH_TOL:e})") }
}

fn criterion_7() -> Outcome {
    let sets = [
        (2.0, 5.0, 10.0, BcMode::Periodic),
        (0.5, 0.0, 1.0, BcMode::Periodic),
        (10.0, 1.0, 0.1, BcMode::DirichletLateral),
    ];
    let mut violations = 0;
    let mut detail = Vec::new();
    for (alpha, beta, lambda, mode) in sets {
        let case = ManufacturedCase { bc_mode: mode, ..example1().with_coefficients(alpha, beta, lambda) };
        let s = RunSettings::new(case, 2, 1e-3, 0.1);
        let init = example1();
        match run_stability(&RunSettings { solver: SolverOptions { tol: 1e-13, ..Default::default() }, ..s }, 3, &|x| init.initial(x)) {
            Ok(rows) => {
                let v = rows.windows(2).filter(|w| w[1].l2_lambda > w[0].l2_lambda).count();
                violations += v;
                detail.push(format!("(α={alpha}, β={beta}, λ={lambda}) {v}"));
            }
            Err(e) => {
                violations += 1;
                detail.push(format!("(α={alpha}, β={beta}, λ={lambda}) {e}"));
            }
        }
    }
    Outcome { pass: violations == 0, detail: format!("100-step violations per set: {}", detail.join(", ")) }
}

fn criterion_8() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    let mut asym: f64 = 0.0;
    let mut kernel: f64 = 0.0;
    for mode in [BcMode::Periodic, BcMode::DirichletLateral] {
        for p in [1, 2] {
            let d = Discretization::new(3, Rectangle::unit_square(), p, mode).unwrap();
            let fp = FormParams::new(2.0, 5.0, 10.0, 10.0, d.h(), PenaltyMode::GammaOverH).unwrap();
            let ops = Operators::assemble(&d, fp).unwrap();
            for m in [&ops.system, &ops.mass, &ops.bulk, &ops.surface] {
                asym = asym.max(m.asymmetry() / m.max_abs());
            }
            let ones = vec![1.0; d.n_dofs()];
            for m in [assemble_bulk_form(&d, &fp), assemble_surface_form(&d, &fp)] {
                let r = m.mul_vec(&ones).iter().fold(0.0f64, |a, v| a.max(v.abs()));
                kernel = kernel.max(r / m.max_abs());
            }
        }
    }
    pass &= asym <= SYMMETRY_TOL && kernel <= KERNEL_TOL;
    notes.push(format!("asymmetry {asym:.1e}, constant residual {kernel:.1e}"));

    let mut min_eig = f64::INFINITY;
    for mode in [BcMode::Periodic, BcMode::DirichletLateral] {
        for p in [1, 2] {
            for level in 0..=2 {
                let d = Discretization::new(level, Rectangle::unit_square(), p, mode).unwrap();
                let fp = FormParams::new(2.0, 5.0, 10.0, 10.0, d.h(), PenaltyMode::GammaOverH).unwrap();
                let ops = Operators::assemble(&d, fp).unwrap();
                for dt in [1e-5, 1e-3, 1e-1] {
                    let eig = SymmetricEigen::new(common::dense(&ops.mass.add_scaled(dt, &ops.system)));
                    min_eig = min_eig.min(eig.eigenvalues.min());
                }
            }
        }
    }
    pass &= min_eig > 0.0;
    notes.push(format!("min eigenvalue of M+dt·A {min_eig:.3e}"));

    let mut oracle: f64 = 0.0;
    for mode in [BcMode::Periodic, BcMode::DirichletLateral] {
        let d = Discretization::new(0, Rectangle::unit_square(), 1, mode).unwrap();
        let fp = FormParams::new(2.0, 5.0, 10.0, 10.0, d.h(), PenaltyMode::GammaOverH).unwrap();
        let ops = Operators::assemble(&d, fp).unwrap();
        let hand = common::level_zero(2.0, 5.0, 10.0, fp.sigma, mode);
        oracle = oracle.max((common::dense(&ops.system) - &hand.system).abs().max());
        oracle = oracle.max((common::dense(&ops.mass) - &hand.mass).abs().max());
    }
    pass &= oracle <= ORACLE_TOL;
    notes.push(format!("level-0 oracle max diff {oracle:.1e}"));
    Outcome { pass, detail: notes.join("; ") }
}

fn criterion_9() -> Outcome {
    let case = example1();
    let mut pass = true;
    let mut detail = Vec::new();
    for p in [1usize, 2] {
        let errs: Vec<f64> = (2..=5)
            .map(|l| {
                let d = Discretization::new(l, Rectangle::unit_square(), p, BcMode::Periodic).unwrap();
                let fp = FormParams::new(2.0, 5.0, 10.0, 10.0, d.h(), PenaltyMode::GammaOverH).unwrap();
                let iu = d.space.interpolate(|x| case.initial(x));
                let exact = |x: Point| (case.u(0.0, x), case.grad_u(0.0, x));
                energy_norm(&d, &fp, BrokenFunction::difference(&exact, &iu))
            })
            .collect();
        let rates: Vec<f64> = errs.windows(2).map(|w| rate(w[0], w[1], 2.0).unwrap()).collect();
        let last = *rates.last().unwrap();
        pass &= (last - p as f64).abs() <= INTERP_TOL;
        detail.push(format!("p={p} rates {:?}", rates.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()));
    }
    Outcome { pass, detail: format!("{} (last pair gated, target p±{INTERP_TOL})", detail.join("; ")) }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let table1 = table1_rows();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 spatial rates p=1", Box::new(|| criterion_1(&table1))),
        ("2 spatial rates p=2", Box::new(criterion_2)),
        ("3 level-4 magnitude", Box::new(|| criterion_3(&table1))),
        ("4 temporal rate", Box::new(criterion_4)),
        ("5 Dirichlet lateral rates", Box::new(criterion_5)),
        ("6 constant patch test", Box::new(criterion_6)),
        ("7 zero-source stability", Box::new(criterion_7)),
        ("8 algebraic properties", Box::new(criterion_8)),
        ("9 interpolation estimate", Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let t = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("[{}] criterion {name}: {} ({:.1}s)", if o.pass { "PASS" } else { "FAIL" }, o.detail, t.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed in {:.1}s", criteria.len() - failed, start.elapsed().as_secs_f64());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
