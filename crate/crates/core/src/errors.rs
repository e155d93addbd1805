//! Error norms against exact solutions and convergence rates.

use crate::assembly::{Discretization, FormParams};
use crate::error::{Error, Result};
use crate::mesh::{BcMode, Point};
use crate::space::{BasisScratch, DgSpace};

/// Closed-form field: value and gradient at a point.
pub type ExactField<'a> = &'a dyn Fn(Point) -> (f64, Point);

/// A broken function `w = exact − dg`; either part may be absent.
#[derive(Clone, Copy)]
pub struct BrokenFunction<'a> {
    pub dg: Option<&'a [f64]>,
    pub exact: Option<ExactField<'a>>,
}

impl<'a> BrokenFunction<'a> {
    pub fn dg(coeffs: &'a [f64]) -> Self {
        Self { dg: Some(coeffs), exact: None }
    }

    pub fn exact(field: ExactField<'a>) -> Self {
        Self { dg: None, exact: Some(field) }
    }

    /// `exact − coeffs`.
    pub fn difference(field: ExactField<'a>, coeffs: &'a [f64]) -> Self {
        Self { dg: Some(coeffs), exact: Some(field) }
    }

    fn eval(&self, space: &DgSpace, element: usize, x: Point, scratch: &mut BasisScratch) -> (f64, Point) {
        let (mut v, mut g) = match self.exact {
            Some(f) => f(x),
            None => (0.0, [0.0, 0.0]),
        };
        if let Some(c) = self.dg {
            let (dv, dg) = space.eval_function(c, element, x, scratch);
            v -= dv;
            g[0] -= dg[0];
            g[1] -= dg[1];
        }
        (v, g)
    }
}

fn lerp(p: Point, q: Point, s: f64) -> Point {
    [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]
}

/// The individual squared contributions to `|||w|||²`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyTerms {
    pub broken_h1: f64,
    pub edge_jumps: f64,
    pub edge_averages: f64,
    pub gamma1_l2: f64,
    pub gamma1_h1: f64,
    pub ridge_jumps: f64,
    pub ridge_averages: f64,
}

impl EnergyTerms {
    /// Weighted sum, `|||w|||²`.
    pub fn total(&self, params: &FormParams) -> f64 {
        let s = params.sigma;
        self.broken_h1
            + s * self.edge_jumps
            + self.edge_averages / s
            + params.alpha * self.gamma1_l2
            + params.beta * self.gamma1_h1
            + params.beta * s * self.ridge_jumps
            + params.beta / s * self.ridge_averages
    }
}

/// Unweighted pieces of the energy norm. In Dirichlet mode the lateral
/// edges and corner ridges contribute the one-sided jump `w` and average
/// `∇w`.
pub fn energy_terms(disc: &Discretization, w: BrokenFunction<'_>) -> EnergyTerms {
    let space = &disc.space;
    let mut sc = space.scratch();
    let mut terms = EnergyTerms::default();
    for t in 0..space.n_elements {
        let geo = &space.geometry[t];
        let jac = geo.det.abs();
        for (xi, wq) in space.data_rule.iter() {
            let (_, g) = w.eval(space, t, geo.to_physical(*xi), &mut sc);
            terms.broken_h1 += wq * jac * (g[0] * g[0] + g[1] * g[1]);
        }
    }
    let edge_rule = &space.data_edge_rule;
    for e in disc.edges.jump_edges() {
        let [p, q] = e.endpoints;
        let len = e.length();
        for (s, wq) in edge_rule.iter() {
            let xp = lerp(p, q, s[0]);
            let xm = [xp[0] + e.shift[0], xp[1] + e.shift[1]];
            let (vp, gp) = w.eval(space, e.plus, xp, &mut sc);
            let (vm, gm) = w.eval(space, e.minus, xm, &mut sc);
            let avg = [0.5 * (gp[0] + gm[0]), 0.5 * (gp[1] + gm[1])];
            terms.edge_jumps += wq * len * (vp - vm).powi(2);
            terms.edge_averages += wq * len * (avg[0] * avg[0] + avg[1] * avg[1]);
        }
    }
    if disc.bc_mode() == BcMode::DirichletLateral {
        for e in &disc.edges.dirichlet {
            let [p, q] = e.endpoints;
            let len = e.length();
            for (s, wq) in edge_rule.iter() {
                let (v, g) = w.eval(space, e.element, lerp(p, q, s[0]), &mut sc);
                terms.edge_jumps += wq * len * v * v;
                terms.edge_averages += wq * len * (g[0] * g[0] + g[1] * g[1]);
            }
        }
    }
    for e in &disc.edges.gamma1 {
        let [p, q] = e.endpoints;
        let len = e.length();
        let tau = [(q[0] - p[0]) / len, (q[1] - p[1]) / len];
        for (s, wq) in edge_rule.iter() {
            let (v, g) = w.eval(space, e.element, lerp(p, q, s[0]), &mut sc);
            let dt = tau[0] * g[0] + tau[1] * g[1];
            terms.gamma1_l2 += wq * len * v * v;
            terms.gamma1_h1 += wq * len * dt * dt;
        }
    }
    for r in &disc.edges.ridges {
        let (vp, gp) = w.eval(space, r.plus.element, r.plus.point, &mut sc);
        match r.minus {
            Some(m) => {
                let (vm, gm) = w.eval(space, m.element, m.point, &mut sc);
                terms.ridge_jumps += (vp - vm).powi(2);
                terms.ridge_averages += (0.5 * (gp[0] + gm[0])).powi(2);
            }
            None => {
                terms.ridge_jumps += vp * vp;
                terms.ridge_averages += gp[0] * gp[0];
            }
        }
    }
    terms
}

/// `|||w|||`.
pub fn energy_norm(disc: &Discretization, params: &FormParams, w: BrokenFunction<'_>) -> f64 {
    energy_terms(disc, w).total(params).max(0.0).sqrt()
}

/// L² errors of a DG function against an exact field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct L2Errors {
    pub domain: f64,
    pub gamma1: f64,
    /// `sqrt(domain² + λ gamma1²)`.
    pub lambda: f64,
}

pub fn l2_errors(disc: &Discretization, lambda: f64, u_h: &[f64], exact: &dyn Fn(Point) -> f64) -> L2Errors {
    let space = &disc.space;
    let mut sc = space.scratch();
    let mut dom = 0.0;
    for t in 0..space.n_elements {
        let geo = &space.geometry[t];
        let jac = geo.det.abs();
        let c = &u_h[space.dofs(t)];
        for (xi, wq) in space.data_rule.iter() {
            space.basis.eval_into(*xi, &mut sc.values, &mut sc.grads);
            let uh: f64 = c.iter().zip(&sc.values).map(|(a, b)| a * b).sum();
            let e = exact(geo.to_physical(*xi)) - uh;
            dom += wq * jac * e * e;
        }
    }
    let mut gam = 0.0;
    for e in &disc.edges.gamma1 {
        let [p, q] = e.endpoints;
        let len = e.length();
        for (s, wq) in space.data_edge_rule.iter() {
            let x = lerp(p, q, s[0]);
            let (uh, _) = space.eval_function(u_h, e.element, x, &mut sc);
            let d = exact(x) - uh;
            gam += wq * len * d * d;
        }
    }
    L2Errors { domain: dom.sqrt(), gamma1: gam.sqrt(), lambda: (dom + lambda * gam).sqrt() }
}

/// Observed order `log(coarse / fine) / log(factor)`.
pub fn rate(err_coarse: f64, err_fine: f64, factor: f64) -> Result<f64> {
    if !(err_coarse > 0.0 && err_fine > 0.0) {
        return Err(Error::InvalidRate(err_coarse, err_fine));
    }
    Ok((err_coarse / err_fine).ln() / factor.ln())
}

/// One row of a convergence table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorRecord {
    pub h: f64,
    pub dt: f64,
    pub l2_domain: f64,
    pub l2_gamma1: f64,
    /// `(Δt Σ_{k=1}^{K} |||e^k|||²)^{1/2}`.
    pub energy_accumulated: f64,
    pub rate_l2_domain: Option<f64>,
    pub rate_l2_gamma1: Option<f64>,
    pub rate_energy: Option<f64>,
}

impl ErrorRecord {
    pub fn new(h: f64, dt: f64, l2_domain: f64, l2_gamma1: f64, energy_accumulated: f64) -> Self {
        Self { h, dt, l2_domain, l2_gamma1, energy_accumulated, rate_l2_domain: None, rate_l2_gamma1: None, rate_energy: None }
    }

    /// Fills the rates against a coarser record. Non-positive errors leave
    /// the corresponding rate empty.
    pub fn with_rates_from(mut self, coarser: &ErrorRecord, factor: f64) -> Self {
        self.rate_l2_domain = rate(coarser.l2_domain, self.l2_domain, factor).ok();
        self.rate_l2_gamma1 = rate(coarser.l2_gamma1, self.l2_gamma1, factor).ok();
        self.rate_energy = rate(coarser.energy_accumulated, self.energy_accumulated, factor).ok();
        self
    }
}

/// Fills rates along a sequence refined by `factor` between rows.
pub fn attach_rates(records: &mut [ErrorRecord], factor: f64) {
    for i in 1..records.len() {
        let prev = records[i - 1];
        records[i] = records[i].with_rates_from(&prev, factor);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::PenaltyMode;
    use crate::mesh::Rectangle;

    fn setup(level: u32, p: usize, mode: BcMode) -> (Discretization, FormParams) {
        let d = Discretization::new(level, Rectangle::unit_square(), p, mode).unwrap();
        let fp = FormParams::new(2.0, 5.0, 10.0, 10.0, d.h(), PenaltyMode::GammaOverH).unwrap();
        (d, fp)
    }

    #[test]
    fn rate_examples() {
        assert!((rate(1.836048e-01, 5.455936e-02, 2.0).unwrap() - 1.75).abs() < 5e-3);
        assert!((rate(2.470397e-02, 3.027272e-03, 2.0).unwrap() - 3.03).abs() < 5e-3);
        assert!((rate(2.682138e-02, 1.487984e-02, 2.0).unwrap() - 0.85).abs() < 5e-3);
        assert!((rate(0.3, 0.15, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(rate(0.0, 1.0, 2.0).is_err());
        assert!(rate(1.0, -1.0, 2.0).is_err());
    }

    #[test]
    fn constant_exact_field() {
        let (d, fp) = setup(2, 1, BcMode::Periodic);
        let c = 3.0;
        let f = move |_: Point| (c, [0.0, 0.0]);
        let n = energy_norm(&d, &fp, BrokenFunction::exact(&f));
        assert!((n - fp.alpha.sqrt() * c * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn l2_measures() {
        let (d, _) = setup(2, 2, BcMode::Periodic);
        let zero = vec![0.0; d.n_dofs()];
        let e = l2_errors(&d, 10.0, &zero, &|_| 1.0);
        assert!((e.domain - 1.0).abs() < 1e-13);
        assert!((e.gamma1 - 2f64.sqrt()).abs() < 1e-13);
        assert!((e.lambda - 21f64.sqrt()).abs() < 1e-13);
        let e0 = l2_errors(&d, 0.0, &zero, &|_| 1.0);
        assert_eq!(e0.lambda, e0.domain);
    }

    #[test]
    fn exact_polynomial_has_zero_error() {
        let (d, _) = setup(2, 2, BcMode::Periodic);
        let q = |p: Point| 1.0 + p[0] * p[1] - p[1] * p[1];
        let c = d.space.interpolate(q);
        let e = l2_errors(&d, 10.0, &c, &q);
        assert!(e.domain < 1e-13 && e.gamma1 < 1e-13);
    }

    #[test]
    fn homogeneity_and_triangle_inequality() {
        let (d, fp) = setup(1, 2, BcMode::Periodic);
        let u: Vec<f64> = (0..d.n_dofs()).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let v: Vec<f64> = (0..d.n_dofs()).map(|i| ((i * 13 % 7) as f64) / 2.0).collect();
        let nu = energy_norm(&d, &fp, BrokenFunction::dg(&u));
        let nv = energy_norm(&d, &fp, BrokenFunction::dg(&v));
        let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let ns = energy_norm(&d, &fp, BrokenFunction::dg(&sum));
        assert!(ns <= nu + nv + 1e-12);
        let scaled: Vec<f64> = u.iter().map(|a| -2.5 * a).collect();
        let nsc = energy_norm(&d, &fp, BrokenFunction::dg(&scaled));
        assert!((nsc - 2.5 * nu).abs() < 1e-12 * nu);
    }

    #[test]
    fn continuous_periodic_function_has_no_jump_terms() {
        let (d, _) = setup(3, 2, BcMode::Periodic);
        let pi2 = 2.0 * std::f64::consts::PI;
        let c = d.space.interpolate(|p| (pi2 * p[0]).cos() * p[1]);
        let t = energy_terms(&d, BrokenFunction::dg(&c));
        // the interpolant of a periodic function is continuous across the
        // identified lateral edges as well
        assert!(t.edge_jumps < 1e-25 && t.ridge_jumps < 1e-25, "{t:?}");
        assert!(t.broken_h1 > 0.0);
    }

    #[test]
    fn attach_rates_fills_all_but_first() {
        let mut recs = vec![ErrorRecord::new(1.0, 0.1, 4.0, 2.0, 1.0), ErrorRecord::new(0.5, 0.1, 1.0, 1.0, 0.5)];
        attach_rates(&mut recs, 2.0);
        assert!(recs[0].rate_l2_domain.is_none());
        assert_eq!(recs[1].rate_l2_domain, Some(2.0));
        assert_eq!(recs[1].rate_energy, Some(1.0));
    }
}
