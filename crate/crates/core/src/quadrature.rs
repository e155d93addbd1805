//! Quadrature on the unit interval and the reference triangle
//! `{x ≥ 0, y ≥ 0, x + y ≤ 1}`.

use crate::error::{Error, Result};

/// Highest polynomial degree for which rules are provided.
pub const MAX_DEGREE: usize = 10;

#[derive(Clone, Debug)]
pub struct QuadratureRule<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

pub type EdgeRule = QuadratureRule<1>;
pub type TriangleRule = QuadratureRule<2>;

impl<const D: usize> QuadratureRule<D> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; D], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_n'(x).
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss points on `[0, 1]` exact for polynomials of the given degree.
pub fn edge_quadrature(exact_degree: usize) -> Result<EdgeRule> {
    if exact_degree > 2 * MAX_DEGREE + 1 {
        return Err(Error::UnsupportedQuadrature(exact_degree));
    }
    let n = exact_degree / 2 + 1;
    let (x, w) = gauss_legendre(n);
    Ok(EdgeRule {
        points: x.iter().map(|&s| [0.5 * (s + 1.0)]).collect(),
        weights: w.iter().map(|&w| 0.5 * w).collect(),
        exact_degree,
    })
}

/// A fully symmetric rule on the reference triangle: a collapsed
/// Gauss–Legendre product rule averaged over the six vertex permutations.
pub fn triangle_quadrature(exact_degree: usize) -> Result<TriangleRule> {
    if !(1..=MAX_DEGREE).contains(&exact_degree) {
        return Err(Error::UnsupportedQuadrature(exact_degree));
    }
    // x = s, y = t(1 - s), Jacobian (1 - s): the s-direction sees degree d+1.
    let n = (exact_degree + 2).div_ceil(2);
    let (g, gw) = gauss_legendre(n);
    let mut base = Vec::with_capacity(n * n);
    for (si, &s) in g.iter().enumerate() {
        let s01 = 0.5 * (s + 1.0);
        for (ti, &t) in g.iter().enumerate() {
            let t01 = 0.5 * (t + 1.0);
            let w = 0.25 * gw[si] * gw[ti] * (1.0 - s01);
            base.push(([1.0 - s01 - t01 * (1.0 - s01), s01, t01 * (1.0 - s01)], w));
        }
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut points = Vec::with_capacity(6 * base.len());
    let mut weights = Vec::with_capacity(6 * base.len());
    for (bary, w) in &base {
        for perm in PERMS {
            points.push([bary[perm[1]], bary[perm[2]]]);
            weights.push(w / 6.0);
        }
    }
    Ok(TriangleRule { points, weights, exact_degree })
}
