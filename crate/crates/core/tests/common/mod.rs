//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's edge classification, quadrature or
//! basis code. The level-0 oracle writes the two triangles, their P1 basis
//! and every edge and ridge term by hand.

#![allow(dead_code)]

use dgdyn::BcMode;
use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3};

type P = [f64; 2];

/// Gauss–Legendre nodes and weights on `[0, 1]` from the eigenvalues of the
/// Jacobi matrix.
pub fn golub_welsch(n: usize) -> Vec<(f64, f64)> {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (x + 1.0), v0 * v0)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Duffy-collapsed tensor rule on a physical triangle, `n²` points.
pub fn triangle_points(v: [P; 3], n: usize) -> Vec<(P, f64)> {
    let gl = golub_welsch(n);
    let area = 0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1])).abs();
    let mut out = Vec::with_capacity(n * n);
    for &(a, wa) in &gl {
        for &(b, wb) in &gl {
            let (s, t) = (a, b * (1.0 - a));
            let x = [
                v[0][0] + s * (v[1][0] - v[0][0]) + t * (v[2][0] - v[0][0]),
                v[0][1] + s * (v[1][1] - v[0][1]) + t * (v[2][1] - v[0][1]),
            ];
            out.push((x, wa * wb * (1.0 - a) * 2.0 * area));
        }
    }
    out
}

/// Linear nodal basis of a triangle: `φ_i = c0 + c1 x + c2 y`.
#[derive(Clone, Copy)]
pub struct P1 {
    coeffs: [[f64; 3]; 3],
}

impl P1 {
    pub fn new(v: [P; 3]) -> Self {
        let m = Matrix3::new(1.0, v[0][0], v[0][1], 1.0, v[1][0], v[1][1], 1.0, v[2][0], v[2][1]);
        let inv = m.try_inverse().expect("non-degenerate triangle");
        let mut coeffs = [[0.0; 3]; 3];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let e = Vector3::from_fn(|r, _| if r == i { 1.0 } else { 0.0 });
            let s = inv * e;
            *c = [s[0], s[1], s[2]];
        }
        Self { coeffs }
    }

    pub fn value(&self, i: usize, x: P) -> f64 {
        let c = self.coeffs[i];
        c[0] + c[1] * x[0] + c[2] * x[1]
    }

    pub fn grad(&self, i: usize, _x: P) -> P {
        [self.coeffs[i][1], self.coeffs[i][2]]
    }
}

const T0: [P; 3] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]];
const T1: [P; 3] = [[0.0, 0.0], [1.0, 1.0], [0.0, 1.0]];

/// Simpson's rule on `[0, 1]`, exact for the quadratic integrands here.
const SIMPSON: [(f64, f64); 3] = [(0.0, 1.0 / 6.0), (0.5, 4.0 / 6.0), (1.0, 1.0 / 6.0)];

pub struct LevelZero {
    /// `B + αC + βb`, plus the Nitsche terms in Dirichlet mode.
    pub system: DMatrix<f64>,
    pub mass: DMatrix<f64>,
}

fn dot(a: P, b: P) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Global DoF `6` layout: three vertex functions of `T0`, then of `T1`.
struct Global {
    basis: [P1; 2],
}

impl Global {
    fn value(&self, dof: usize, elem: usize, x: P) -> f64 {
        if dof / 3 == elem { self.basis[elem].value(dof % 3, x) } else { 0.0 }
    }
    fn grad(&self, dof: usize, elem: usize, x: P) -> P {
        if dof / 3 == elem { self.basis[elem].grad(dof % 3, x) } else { [0.0, 0.0] }
    }
}

/// Brute-force p=1 assembly of the single-cell mesh.
pub fn level_zero(alpha: f64, beta: f64, lambda: f64, sigma: f64, mode: BcMode) -> LevelZero {
    let g = Global { basis: [P1::new(T0), P1::new(T1)] };
    let mut a = DMatrix::<f64>::zeros(6, 6);
    let mut m = DMatrix::<f64>::zeros(6, 6);
    let s2 = std::f64::consts::SQRT_2;

    // two-sided edges: (plus elem, plus point, minus elem, minus point, normal out of plus, length)
    type Side = fn(f64) -> P;
    let mut jumps: Vec<(usize, Side, usize, Side, P, f64)> = vec![(0, |s| [s, s], 1, |s| [s, s], [-1.0 / s2, 1.0 / s2], s2)];
    // one-sided lateral edges: (elem, point, outward normal)
    let mut lateral: Vec<(usize, Side, P)> = Vec::new();
    match mode {
        BcMode::Periodic => jumps.push((0, |s| [1.0, s], 1, |s| [0.0, s], [1.0, 0.0], 1.0)),
        BcMode::DirichletLateral => {
            lateral.push((0, |s| [1.0, s], [1.0, 0.0]));
            lateral.push((1, |s| [0.0, s], [-1.0, 0.0]));
        }
    }
    // Γ1 edges: (elem, y)
    let gamma: [(usize, f64); 2] = [(0, 0.0), (1, 1.0)];

    for i in 0..6 {
        for j in 0..6 {
            let mut v = 0.0;
            // volume stiffness and mass (midpoint rule is exact for quadratics)
            for (e, tri) in [T0, T1].iter().enumerate() {
                let area = 0.5;
                v += area * dot(g.grad(i, e, tri[0]), g.grad(j, e, tri[0]));
                for k in 0..3 {
                    let p = tri[k];
                    let q = tri[(k + 1) % 3];
                    let mid = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
                    m[(i, j)] += area / 3.0 * g.value(i, e, mid) * g.value(j, e, mid);
                }
            }
            for &(ep, xp, em, xm, n, len) in &jumps {
                for &(s, w) in &SIMPSON {
                    let (pp, pm) = (xp(s), xm(s));
                    let ji = g.value(i, ep, pp) - g.value(i, em, pm);
                    let jj = g.value(j, ep, pp) - g.value(j, em, pm);
                    let avg = |d: usize| {
                        let (a, b) = (g.grad(d, ep, pp), g.grad(d, em, pm));
                        0.5 * dot([a[0] + b[0], a[1] + b[1]], n)
                    };
                    v += w * len * (-ji * avg(j) - jj * avg(i) + sigma * ji * jj);
                }
            }
            for &(e, x, n) in &lateral {
                for &(s, w) in &SIMPSON {
                    let p = x(s);
                    let (vi, vj) = (g.value(i, e, p), g.value(j, e, p));
                    let (dni, dnj) = (dot(g.grad(i, e, p), n), dot(g.grad(j, e, p), n));
                    v += w * (-vi * dnj - vj * dni + sigma * vi * vj);
                }
            }
            for &(e, y) in &gamma {
                for &(s, w) in &SIMPSON {
                    let p = [s, y];
                    let (vi, vj) = (g.value(i, e, p), g.value(j, e, p));
                    v += w * (alpha * vi * vj + beta * g.grad(i, e, p)[0] * g.grad(j, e, p)[0]);
                    m[(i, j)] += w * lambda * vi * vj;
                }
                match mode {
                    // one ridge per side at x = 0 ≡ 1; left of it is the right end of the same edge
                    BcMode::Periodic => {
                        let (pl, pr) = ([1.0, y], [0.0, y]);
                        let ji = g.value(i, e, pl) - g.value(i, e, pr);
                        let jj = g.value(j, e, pl) - g.value(j, e, pr);
                        let ai = 0.5 * (g.grad(i, e, pl)[0] + g.grad(i, e, pr)[0]);
                        let aj = 0.5 * (g.grad(j, e, pl)[0] + g.grad(j, e, pr)[0]);
                        v += beta * (-ji * aj - jj * ai + sigma * ji * jj);
                    }
                    BcMode::DirichletLateral => {
                        for (x, nt) in [(0.0, -1.0), (1.0, 1.0)] {
                            let p = [x, y];
                            let (vi, vj) = (g.value(i, e, p), g.value(j, e, p));
                            let (di, dj) = (nt * g.grad(i, e, p)[0], nt * g.grad(j, e, p)[0]);
                            v += beta * (-vi * dj - vj * di + sigma * vi * vj);
                        }
                    }
                }
            }
            a[(i, j)] = v;
        }
    }
    LevelZero { system: a, mass: m }
}

pub fn dense(m: &dgdyn::sparse::SparseMatrix) -> DMatrix<f64> {
    let d = m.to_dense();
    DMatrix::from_fn(d.len(), d.len(), |i, j| d[i][j])
}
