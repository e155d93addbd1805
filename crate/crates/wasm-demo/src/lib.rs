//! Browser bindings: a solution field for canvas rendering, a convergence
//! table and a stability curve. Everything runs on the calling thread.

use dgdyn::report::{converge_h_table, Format};
use dgdyn::study::{run_converge_h, run_stability};
use dgdyn::{example1, example3, run_backward_euler, ManufacturedCase, Operators, Result, RunSettings, TimeConfig};
use wasm_bindgen::prelude::*;

fn case_named(name: &str) -> Result<ManufacturedCase> {
    match name {
        "example1" => Ok(example1()),
        "example3" => Ok(example3()),
        _ => Err(dgdyn::Error::Config(format!("unknown case `{name}`"))),
    }
}

/// Per triangle, the three vertices as `x, y, u_h` (nine numbers each).
/// Values are taken from the triangle's own polynomial, so jumps show.
pub fn field(case: &str, level: u32, p: usize, dt: f64, t_final: f64) -> Result<Vec<f64>> {
    let s = RunSettings::new(case_named(case)?, p, dt, t_final);
    let disc = s.discretization(level)?;
    let ops = Operators::assemble(&disc, s.params(disc.h())?)?;
    let c = s.case;
    let u0 = s.projection.apply(&disc, c.lambda, &|x| c.initial(x))?;
    let out = run_backward_euler(&disc, &ops, &c, u0, TimeConfig { dt, t_final }, &s.solver, false, &mut |_| {})?;
    let mut sc = disc.space.scratch();
    let mut data = Vec::with_capacity(disc.mesh.n_triangles() * 9);
    for t in 0..disc.mesh.n_triangles() {
        let verts = disc.mesh.triangle_vertices(t);
        // pull the sample point slightly inside so it stays on this element
        let cx = [(verts[0][0] + verts[1][0] + verts[2][0]) / 3.0, (verts[0][1] + verts[1][1] + verts[2][1]) / 3.0];
        for v in verts {
            let x = [v[0] + 1e-9 * (cx[0] - v[0]), v[1] + 1e-9 * (cx[1] - v[1])];
            let (u, _) = disc.space.eval_function(&out.final_state, t, x, &mut sc);
            data.extend([v[0], v[1], u]);
        }
    }
    Ok(data)
}

pub fn convergence(case: &str, p: usize, min_level: u32, max_level: u32, dt: f64, t_final: f64, markdown: bool) -> Result<String> {
    if min_level > max_level {
        return Err(dgdyn::Error::Config("empty level range".into()));
    }
    let s = RunSettings::new(case_named(case)?, p, dt, t_final);
    let levels: Vec<u32> = (min_level..=max_level).collect();
    let format = if markdown { Format::Markdown } else { Format::Csv };
    Ok(converge_h_table(&run_converge_h(&s, &levels)?).render(format))
}

/// `L²_λ` norms of a source-free run started from the case's initial datum.
pub fn stability(level: u32, p: usize, alpha: f64, beta: f64, lambda: f64, dt: f64, t_final: f64) -> Result<Vec<f64>> {
    let case = example1().with_coefficients(alpha, beta, lambda);
    let s = RunSettings::new(case, p, dt, t_final);
    Ok(run_stability(&s, level, &|x| case.initial(x))?.iter().map(|r| r.l2_lambda).collect())
}

fn js(e: dgdyn::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = solutionField)]
pub fn solution_field(case: &str, level: u32, p: usize, dt: f64, t_final: f64) -> std::result::Result<Vec<f64>, JsError> {
    field(case, level, p, dt, t_final).map_err(js)
}

#[wasm_bindgen(js_name = convergenceTable)]
pub fn convergence_table(case: &str, p: usize, min_level: u32, max_level: u32, dt: f64, t_final: f64, markdown: bool) -> std::result::Result<String, JsError> {
    convergence(case, p, min_level, max_level, dt, t_final, markdown).map_err(js)
}

#[wasm_bindgen(js_name = stabilityCurve)]
pub fn stability_curve(level: u32, p: usize, alpha: f64, beta: f64, lambda: f64, dt: f64, t_final: f64) -> std::result::Result<Vec<f64>, JsError> {
    stability(level, p, alpha, beta, lambda, dt, t_final).map_err(js)
}
