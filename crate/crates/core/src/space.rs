//! Discontinuous Lagrange spaces on triangles.

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};
use crate::quadrature::{edge_quadrature, triangle_quadrature, EdgeRule, TriangleRule};

/// Lagrange basis of degree `p` on the reference triangle with equispaced
/// nodes: the three vertices first, then the nodes interior to the edges
/// `(0,0)-(1,0)`, `(1,0)-(0,1)`, `(0,1)-(0,0)`, then interior nodes.
#[derive(Clone, Debug)]
pub struct ReferenceBasis {
    pub degree: usize,
    /// Barycentric multi-indices `(i0, i1, i2)`, `i0 + i1 + i2 = p`, where
    /// `λ0 = 1 - x - y`, `λ1 = x`, `λ2 = y`.
    indices: Vec<[usize; 3]>,
}

pub const MAX_SUPPORTED_DEGREE: usize = 4;

/// `R_m(λ) = Π_{l<m} (pλ - l) / (l + 1)` and its derivative.
fn silvester(p: usize, m: usize, lambda: f64) -> (f64, f64) {
    let mut value = 1.0;
    let mut deriv = 0.0;
    for l in 0..m {
        let factor = (p as f64 * lambda - l as f64) / (l as f64 + 1.0);
        let dfactor = p as f64 / (l as f64 + 1.0);
        deriv = deriv * factor + value * dfactor;
        value *= factor;
    }
    (value, deriv)
}

impl ReferenceBasis {
    pub fn new(degree: usize) -> Result<Self> {
        if !(1..=MAX_SUPPORTED_DEGREE).contains(&degree) {
            return Err(Error::UnsupportedDegree(degree));
        }
        let p = degree;
        let mut indices = vec![[p, 0, 0], [0, p, 0], [0, 0, p]];
        for k in 1..p {
            indices.push([p - k, k, 0]);
        }
        for k in 1..p {
            indices.push([0, p - k, k]);
        }
        for k in 1..p {
            indices.push([k, 0, p - k]);
        }
        for j in 1..p {
            for i in 1..p - j {
                indices.push([p - i - j, i, j]);
            }
        }
        debug_assert_eq!(indices.len(), (p + 1) * (p + 2) / 2);
        Ok(Self { degree, indices })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Reference coordinates of the Lagrange nodes.
    pub fn nodes(&self) -> Vec<Point> {
        let p = self.degree as f64;
        self.indices.iter().map(|ix| [ix[1] as f64 / p, ix[2] as f64 / p]).collect()
    }

    /// Values and reference gradients of all basis functions at `xi`.
    pub fn eval_into(&self, xi: Point, values: &mut [f64], grads: &mut [Point]) {
        let lam = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
        let p = self.degree;
        for (k, ix) in self.indices.iter().enumerate() {
            let r: [(f64, f64); 3] = std::array::from_fn(|c| silvester(p, ix[c], lam[c]));
            values[k] = r[0].0 * r[1].0 * r[2].0;
            // dλ0 = (-1,-1), dλ1 = (1,0), dλ2 = (0,1)
            let d0 = r[0].1 * r[1].0 * r[2].0;
            let d1 = r[0].0 * r[1].1 * r[2].0;
            let d2 = r[0].0 * r[1].0 * r[2].1;
            grads[k] = [d1 - d0, d2 - d0];
        }
    }

    pub fn eval(&self, xi: Point) -> (Vec<f64>, Vec<Point>) {
        let mut v = vec![0.0; self.len()];
        let mut g = vec![[0.0; 2]; self.len()];
        self.eval_into(xi, &mut v, &mut g);
        (v, g)
    }
}

/// `reference_basis(p)`.
pub fn reference_basis(p: usize) -> Result<ReferenceBasis> {
    ReferenceBasis::new(p)
}

/// Affine map from the reference triangle onto a mesh triangle.
#[derive(Clone, Copy, Debug)]
pub struct ElementGeometry {
    pub origin: Point,
    /// Columns `v1 - v0`, `v2 - v0`.
    pub jacobian: [[f64; 2]; 2],
    pub det: f64,
    /// Inverse Jacobian, row-major.
    pub inv: [[f64; 2]; 2],
}

impl ElementGeometry {
    pub fn new(v: [Point; 3]) -> Self {
        let j = [[v[1][0] - v[0][0], v[2][0] - v[0][0]], [v[1][1] - v[0][1], v[2][1] - v[0][1]]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
        Self { origin: v[0], jacobian: j, det, inv }
    }

    pub fn to_physical(&self, xi: Point) -> Point {
        let j = &self.jacobian;
        [
            self.origin[0] + j[0][0] * xi[0] + j[0][1] * xi[1],
            self.origin[1] + j[1][0] * xi[0] + j[1][1] * xi[1],
        ]
    }

    pub fn to_reference(&self, x: Point) -> Point {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        [self.inv[0][0] * d[0] + self.inv[0][1] * d[1], self.inv[1][0] * d[0] + self.inv[1][1] * d[1]]
    }

    /// Pushes a reference gradient forward with `J^{-T}`.
    pub fn physical_gradient(&self, g: Point) -> Point {
        [self.inv[0][0] * g[0] + self.inv[1][0] * g[1], self.inv[0][1] * g[0] + self.inv[1][1] * g[1]]
    }
}

/// `V^p` on a mesh: element-contiguous DoF blocks plus the quadrature rules
/// used throughout assembly and error computation.
#[derive(Clone, Debug)]
pub struct DgSpace {
    pub basis: ReferenceBasis,
    pub n_local: usize,
    pub n_elements: usize,
    pub geometry: Vec<ElementGeometry>,
    /// Exact for the products of two basis functions (degree `2p`).
    pub operator_rule: TriangleRule,
    pub operator_edge_rule: EdgeRule,
    /// For non-polynomial data (degree `2p + 4`).
    pub data_rule: TriangleRule,
    pub data_edge_rule: EdgeRule,
}

impl DgSpace {
    pub fn new(mesh: &Mesh, p: usize) -> Result<Self> {
        let basis = ReferenceBasis::new(p)?;
        let geometry = (0..mesh.n_triangles()).map(|t| ElementGeometry::new(mesh.triangle_vertices(t))).collect();
        Ok(Self {
            n_local: basis.len(),
            n_elements: mesh.n_triangles(),
            geometry,
            operator_rule: triangle_quadrature(2 * p)?,
            operator_edge_rule: edge_quadrature(2 * p)?,
            data_rule: triangle_quadrature(2 * p + 4)?,
            data_edge_rule: edge_quadrature(2 * p + 4)?,
            basis,
        })
    }

    pub fn degree(&self) -> usize {
        self.basis.degree
    }

    pub fn n_dofs(&self) -> usize {
        self.n_local * self.n_elements
    }

    /// First global DoF of an element; its block is `offset..offset + n_local`.
    pub fn dof_offset(&self, element: usize) -> usize {
        element * self.n_local
    }

    pub fn dofs(&self, element: usize) -> std::ops::Range<usize> {
        let o = self.dof_offset(element);
        o..o + self.n_local
    }

    /// Values and physical gradients of the element's basis at physical
    /// point `x` (which may lie on the element's closure or, for periodic
    /// traces, be given in the element's own frame).
    pub fn eval_basis(&self, element: usize, x: Point, values: &mut [f64], grads: &mut [Point]) {
        let geo = &self.geometry[element];
        self.basis.eval_into(geo.to_reference(x), values, grads);
        for g in grads.iter_mut() {
            *g = geo.physical_gradient(*g);
        }
    }

    /// Value and gradient of the DG function `coeffs` restricted to `element`.
    pub fn eval_function(&self, coeffs: &[f64], element: usize, x: Point, scratch: &mut BasisScratch) -> (f64, Point) {
        self.eval_basis(element, x, &mut scratch.values, &mut scratch.grads);
        let c = &coeffs[self.dofs(element)];
        let mut v = 0.0;
        let mut g = [0.0; 2];
        for k in 0..self.n_local {
            v += c[k] * scratch.values[k];
            g[0] += c[k] * scratch.grads[k][0];
            g[1] += c[k] * scratch.grads[k][1];
        }
        (v, g)
    }

    pub fn scratch(&self) -> BasisScratch {
        BasisScratch { values: vec![0.0; self.n_local], grads: vec![[0.0; 2]; self.n_local] }
    }

    /// Nodal interpolant `I_p^h u`: element-wise Lagrange interpolation.
    pub fn interpolate(&self, u: impl Fn(Point) -> f64) -> Vec<f64> {
        let nodes = self.basis.nodes();
        let mut out = Vec::with_capacity(self.n_dofs());
        for geo in &self.geometry {
            out.extend(nodes.iter().map(|&xi| u(geo.to_physical(xi))));
        }
        out
    }
}

/// Reusable buffers for basis evaluation.
#[derive(Clone, Debug)]
pub struct BasisScratch {
    pub values: Vec<f64>,
    pub grads: Vec<Point>,
}
