//! Closed-form test problems and the data they induce.
//!
//! For an exact `u` the sources are
//!
//! ```text
//! f = ∂_t u − Δu                                  in Ω
//! g = λ ∂_t u + ∂_n u + α u − β ∂²u/∂x²            on Γ1
//! ```

use std::f64::consts::PI;

use crate::mesh::{BcMode, BoundarySide, Point};

/// Time-dependent data of a problem: volume source, boundary source and the
/// lateral Dirichlet datum.
pub trait Sources {
    fn f(&self, t: f64, x: Point) -> f64;
    fn g(&self, t: f64, x: Point, side: BoundarySide) -> f64;
    fn dirichlet(&self, _t: f64, _x: Point) -> f64 {
        0.0
    }
}

/// All data vanish.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroSources;

impl Sources for ZeroSources {
    fn f(&self, _t: f64, _x: Point) -> f64 {
        0.0
    }
    fn g(&self, _t: f64, _x: Point, _s: BoundarySide) -> f64 {
        0.0
    }
}

/// Data for which the constant `value` is an exact steady solution:
/// `f = 0`, `g = α c`, `u_D = c`.
#[derive(Clone, Copy, Debug)]
pub struct ConstantSolution {
    pub value: f64,
    pub alpha: f64,
}

impl Sources for ConstantSolution {
    fn f(&self, _t: f64, _x: Point) -> f64 {
        0.0
    }
    fn g(&self, _t: f64, _x: Point, _s: BoundarySide) -> f64 {
        self.alpha * self.value
    }
    fn dirichlet(&self, _t: f64, _x: Point) -> f64 {
        self.value
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseKind {
    /// `u = e^{−10t}(1 − cos 2πx) cos 4πy`, periodic in `x`.
    Example1,
    /// `u = t (1 − cos 2πx) cos πy`, lateral Dirichlet.
    Example3,
}

/// A manufactured solution bound to the coefficients used to derive `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManufacturedCase {
    pub kind: CaseKind,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub bc_mode: BcMode,
}

pub fn example1() -> ManufacturedCase {
    ManufacturedCase { kind: CaseKind::Example1, alpha: 2.0, beta: 5.0, lambda: 10.0, bc_mode: BcMode::Periodic }
}

pub fn example3() -> ManufacturedCase {
    ManufacturedCase { kind: CaseKind::Example3, alpha: 2.0, beta: 5.0, lambda: 10.0, bc_mode: BcMode::DirichletLateral }
}

/// Separable pieces `u = T(t) X(x) Y(y)` and their derivatives.
struct Factors {
    t: f64,
    dt: f64,
    x: f64,
    dx: f64,
    dxx: f64,
    y: f64,
    dy: f64,
    dyy: f64,
}

impl ManufacturedCase {
    pub fn with_coefficients(self, alpha: f64, beta: f64, lambda: f64) -> Self {
        Self { alpha, beta, lambda, ..self }
    }

    fn factors(&self, t: f64, p: Point) -> Factors {
        let [x, y] = p;
        let (s2, c2) = (2.0 * PI * x).sin_cos();
        let ky = match self.kind {
            CaseKind::Example1 => 4.0 * PI,
            CaseKind::Example3 => PI,
        };
        let (sy, cy) = (ky * y).sin_cos();
        let (tt, dt) = match self.kind {
            CaseKind::Example1 => {
                let e = (-10.0 * t).exp();
                (e, -10.0 * e)
            }
            CaseKind::Example3 => (t, 1.0),
        };
        Factors {
            t: tt,
            dt,
            x: 1.0 - c2,
            dx: 2.0 * PI * s2,
            dxx: 4.0 * PI * PI * c2,
            y: cy,
            dy: -ky * sy,
            dyy: -ky * ky * cy,
        }
    }

    pub fn u(&self, t: f64, p: Point) -> f64 {
        let f = self.factors(t, p);
        f.t * f.x * f.y
    }

    pub fn grad_u(&self, t: f64, p: Point) -> Point {
        let f = self.factors(t, p);
        [f.t * f.dx * f.y, f.t * f.x * f.dy]
    }

    pub fn du_dt(&self, t: f64, p: Point) -> f64 {
        let f = self.factors(t, p);
        f.dt * f.x * f.y
    }

    pub fn laplacian_u(&self, t: f64, p: Point) -> f64 {
        let f = self.factors(t, p);
        f.t * (f.dxx * f.y + f.x * f.dyy)
    }

    pub fn uxx(&self, t: f64, p: Point) -> f64 {
        let f = self.factors(t, p);
        f.t * f.dxx * f.y
    }

    pub fn initial(&self, p: Point) -> f64 {
        self.u(0.0, p)
    }
}

impl Sources for ManufacturedCase {
    fn f(&self, t: f64, p: Point) -> f64 {
        self.du_dt(t, p) - self.laplacian_u(t, p)
    }

    fn g(&self, t: f64, p: Point, side: BoundarySide) -> f64 {
        let grad = self.grad_u(t, p);
        let n = side.normal();
        let dn = grad[0] * n[0] + grad[1] * n[1];
        self.lambda * self.du_dt(t, p) + dn + self.alpha * self.u(t, p) - self.beta * self.uxx(t, p)
    }

    fn dirichlet(&self, t: f64, p: Point) -> f64 {
        self.u(t, p)
    }
}

/// A manufactured field frozen at time `t`, with sources for the
/// stationary problem `𝒜_h u = F` (no time derivatives).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stationary {
    pub case: ManufacturedCase,
    pub t: f64,
}

impl Sources for Stationary {
    fn f(&self, _t: f64, p: Point) -> f64 {
        -self.case.laplacian_u(self.t, p)
    }

    fn g(&self, _t: f64, p: Point, side: BoundarySide) -> f64 {
        let c = &self.case;
        let grad = c.grad_u(self.t, p);
        let n = side.normal();
        grad[0] * n[0] + grad[1] * n[1] + c.alpha * c.u(self.t, p) - c.beta * c.uxx(self.t, p)
    }

    fn dirichlet(&self, _t: f64, p: Point) -> f64 {
        self.case.u(self.t, p)
    }
}
