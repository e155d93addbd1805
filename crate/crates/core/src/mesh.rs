//! Structured triangulations of a rectangle and the edge/ridge bookkeeping
//! needed by the interior penalty forms.
//!
//! The domain `(a,b)×(c,d)` has its top and bottom sides carrying the dynamic
//! boundary condition and its left and right sides either identified
//! periodically or treated as Dirichlet faces.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// A point in the plane.
pub type Point = [f64; 2];

/// The rectangle `(a,b)×(c,d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rectangle {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Rectangle {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if !(a < b && c < d) {
            return Err(Error::InvalidDomain { a, b, c, d });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn unit_square() -> Self {
        Self { a: 0.0, b: 1.0, c: 0.0, d: 1.0 }
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn height(&self) -> f64 {
        self.d - self.c
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

impl Default for Rectangle {
    fn default() -> Self {
        Self::unit_square()
    }
}

/// Treatment of the lateral sides `x = a` and `x = b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BcMode {
    Periodic,
    DirichletLateral,
}

/// Which part of the dynamic boundary an edge lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundarySide {
    Bottom,
    Top,
}

impl BoundarySide {
    /// Outward unit normal of the domain on this side.
    pub fn normal(self) -> Point {
        match self {
            BoundarySide::Bottom => [0.0, -1.0],
            BoundarySide::Top => [0.0, 1.0],
        }
    }
}

/// A triangulated rectangle.
#[derive(Clone, Debug)]
pub struct Mesh {
    pub domain: Rectangle,
    pub vertices: Vec<Point>,
    /// Vertex indices, counterclockwise.
    pub triangles: Vec<[usize; 3]>,
    pub level: u32,
    /// Squares per side.
    pub divisions: usize,
    /// Longest edge, i.e. the diagonal of one grid cell.
    pub h: f64,
}

/// Builds the `N×N` grid (`N = 2^level`) of cells, each split by its
/// lower-left to upper-right diagonal. Vertices are numbered row-major from
/// the bottom-left corner.
pub fn build_structured_mesh(level: u32, domain: Rectangle) -> Mesh {
    let n = 1usize << level;
    let hx = domain.width() / n as f64;
    let hy = domain.height() / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            // Pin the far sides to the exact domain bounds.
            let x = if i == n { domain.b } else { domain.a + i as f64 * hx };
            let y = if j == n { domain.d } else { domain.c + j as f64 * hy };
            vertices.push([x, y]);
        }
    }
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let v00 = vid(i, j);
            let v10 = vid(i + 1, j);
            let v01 = vid(i, j + 1);
            let v11 = vid(i + 1, j + 1);
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    Mesh {
        domain,
        vertices,
        triangles,
        level,
        divisions: n,
        h: hx.hypot(hy),
    }
}

impl Mesh {
    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_vertices(&self, t: usize) -> [Point; 3] {
        let [i, j, k] = self.triangles[t];
        [self.vertices[i], self.vertices[j], self.vertices[k]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [p0, p1, p2] = self.triangle_vertices(t);
        0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
    }

    /// Index of the triangle containing `p` (closed triangles; the first
    /// match wins on shared edges).
    pub fn locate(&self, p: Point) -> Option<usize> {
        let n = self.divisions;
        let hx = self.domain.width() / n as f64;
        let hy = self.domain.height() / n as f64;
        let fx = (p[0] - self.domain.a) / hx;
        let fy = (p[1] - self.domain.c) / hy;
        if !(-1e-12..=n as f64 + 1e-12).contains(&fx) || !(-1e-12..=n as f64 + 1e-12).contains(&fy) {
            return None;
        }
        let i = (fx.floor().max(0.0) as usize).min(n - 1);
        let j = (fy.floor().max(0.0) as usize).min(n - 1);
        let (lx, ly) = (fx - i as f64, fy - j as f64);
        let cell = 2 * (j * n + i);
        Some(if ly <= lx { cell } else { cell + 1 })
    }
}

/// An edge with a triangle on each side (possibly across the periodic
/// identification).
#[derive(Clone, Debug)]
pub struct InteriorEdge {
    /// Endpoints as seen from `plus`.
    pub endpoints: [Point; 2],
    pub plus: usize,
    pub minus: usize,
    /// Unit normal pointing out of `plus`.
    pub normal: Point,
    /// Translation taking a point on the edge as seen from `plus` to the
    /// same point as seen from `minus`. Zero for geometric interior edges.
    pub shift: Point,
}

impl InteriorEdge {
    pub fn length(&self) -> f64 {
        let [p, q] = self.endpoints;
        (q[0] - p[0]).hypot(q[1] - p[1])
    }
}

/// An edge on the top or bottom side.
#[derive(Clone, Debug)]
pub struct Gamma1Edge {
    /// Endpoints ordered by increasing `x`.
    pub endpoints: [Point; 2],
    pub element: usize,
    pub side: BoundarySide,
}

impl Gamma1Edge {
    pub fn length(&self) -> f64 {
        let [p, q] = self.endpoints;
        (q[0] - p[0]).hypot(q[1] - p[1])
    }
}

/// A lateral edge carrying a weakly imposed Dirichlet condition.
#[derive(Clone, Debug)]
pub struct DirichletEdge {
    pub endpoints: [Point; 2],
    pub element: usize,
    /// Outward unit normal of the domain.
    pub normal: Point,
}

impl DirichletEdge {
    pub fn length(&self) -> f64 {
        let [p, q] = self.endpoints;
        (q[0] - p[0]).hypot(q[1] - p[1])
    }
}

/// One side of a ridge: the boundary edge it belongs to, evaluated at the
/// ridge point in that edge's own coordinates.
#[derive(Clone, Copy, Debug)]
pub struct RidgeSide {
    /// Index into [`EdgeClassification::gamma1`].
    pub edge: usize,
    pub element: usize,
    pub point: Point,
    /// Unit tangent to the boundary at the ridge pointing out of `edge`,
    /// stored as its `x` component (`+1` or `-1`).
    pub tangent_sign: f64,
}

/// A vertex on the dynamic boundary. Two-sided ridges sit between two
/// boundary edges (`minus` present); in Dirichlet mode the corner vertices
/// are one-sided.
#[derive(Clone, Debug)]
pub struct Ridge {
    /// Vertex id; for a fused periodic corner this is the left-side vertex.
    pub vertex: usize,
    pub side: BoundarySide,
    pub plus: RidgeSide,
    pub minus: Option<RidgeSide>,
}

impl Ridge {
    pub fn is_dirichlet(&self) -> bool {
        self.minus.is_none()
    }
}

/// The classified edge and ridge sets of a mesh.
#[derive(Clone, Debug)]
pub struct EdgeClassification {
    pub bc_mode: BcMode,
    /// Geometric interior edges.
    pub interior: Vec<InteriorEdge>,
    /// Identified left/right edge pairs; empty in Dirichlet mode.
    pub periodic: Vec<InteriorEdge>,
    pub gamma1: Vec<Gamma1Edge>,
    /// Lateral edges; empty in periodic mode.
    pub dirichlet: Vec<DirichletEdge>,
    pub ridges: Vec<Ridge>,
}

impl EdgeClassification {
    /// Interior and periodic edges, the faces carrying jump terms.
    pub fn jump_edges(&self) -> impl Iterator<Item = &InteriorEdge> {
        self.interior.iter().chain(self.periodic.iter())
    }
}

fn outward_normal(p: Point, q: Point) -> Point {
    // Counterclockwise triangles: the outward normal of edge p→q is the
    // tangent rotated clockwise.
    let (tx, ty) = (q[0] - p[0], q[1] - p[1]);
    let len = tx.hypot(ty);
    [ty / len, -tx / len]
}

/// Sorts every geometric edge into the interior, dynamic boundary, lateral
/// (periodic or Dirichlet) sets and builds the ridges of the top and bottom
/// boundary.
pub fn classify_edges(mesh: &Mesh, bc_mode: BcMode) -> Result<EdgeClassification> {
    // (min vertex, max vertex) -> [(triangle, local start vertex)]
    let mut owners: HashMap<(usize, usize), Vec<(usize, usize, usize)>> = HashMap::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for k in 0..3 {
            let (u, v) = (tri[k], tri[(k + 1) % 3]);
            owners.entry((u.min(v), u.max(v))).or_default().push((t, u, v));
        }
    }
    let Rectangle { a, b, c, d } = mesh.domain;
    let tol = 1e-12 * (mesh.domain.width() + mesh.domain.height());

    let mut interior = Vec::new();
    let mut gamma1 = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();

    let mut keys: Vec<_> = owners.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let list = &owners[&key];
        match list.as_slice() {
            [first, second] => {
                let (plus, minus) = if first.0 < second.0 { (first, second) } else { (second, first) };
                let (p, q) = (mesh.vertices[plus.1], mesh.vertices[plus.2]);
                interior.push(InteriorEdge {
                    endpoints: [p, q],
                    plus: plus.0,
                    minus: minus.0,
                    normal: outward_normal(p, q),
                    shift: [0.0, 0.0],
                });
            }
            [(t, u, v)] => {
                let (p, q) = (mesh.vertices[*u], mesh.vertices[*v]);
                if (p[1] - c).abs() < tol && (q[1] - c).abs() < tol {
                    gamma1.push(Gamma1Edge { endpoints: order_x(p, q), element: *t, side: BoundarySide::Bottom });
                } else if (p[1] - d).abs() < tol && (q[1] - d).abs() < tol {
                    gamma1.push(Gamma1Edge { endpoints: order_x(p, q), element: *t, side: BoundarySide::Top });
                } else if (p[0] - a).abs() < tol && (q[0] - a).abs() < tol {
                    left.push((*t, p, q));
                } else if (p[0] - b).abs() < tol && (q[0] - b).abs() < tol {
                    right.push((*t, p, q));
                } else {
                    return Err(Error::MalformedMesh(format!(
                        "edge {key:?} has one owner but is not on the boundary"
                    )));
                }
            }
            _ => {
                return Err(Error::MalformedMesh(format!(
                    "edge {key:?} is shared by {} triangles",
                    list.len()
                )))
            }
        }
    }
    gamma1.sort_by(|e, f| {
        (e.side as u8, e.endpoints[0][0])
            .partial_cmp(&(f.side as u8, f.endpoints[0][0]))
            .expect("finite coordinates")
    });

    let mut periodic = Vec::new();
    let mut dirichlet = Vec::new();
    match bc_mode {
        BcMode::Periodic => {
            if left.len() != right.len() {
                return Err(Error::MalformedMesh("unequal lateral edge counts".into()));
            }
            let ymin = |p: Point, q: Point| p[1].min(q[1]);
            left.sort_by(|x, y| ymin(x.1, x.2).partial_cmp(&ymin(y.1, y.2)).unwrap());
            right.sort_by(|x, y| ymin(x.1, x.2).partial_cmp(&ymin(y.1, y.2)).unwrap());
            for (&(tr, p, q), &(tl, lp, lq)) in right.iter().zip(left.iter()) {
                let same = ((p[1].min(q[1]) - lp[1].min(lq[1])).abs() < tol)
                    && ((p[1].max(q[1]) - lp[1].max(lq[1])).abs() < tol);
                if !same {
                    return Err(Error::MalformedMesh("lateral edges do not match in y".into()));
                }
                periodic.push(InteriorEdge {
                    endpoints: [p, q],
                    plus: tr,
                    minus: tl,
                    normal: outward_normal(p, q),
                    shift: [a - b, 0.0],
                });
            }
        }
        BcMode::DirichletLateral => {
            for (t, p, q) in left.into_iter().chain(right) {
                dirichlet.push(DirichletEdge { endpoints: [p, q], element: t, normal: outward_normal(p, q) });
            }
        }
    }

    let ridges = build_ridges(mesh, &gamma1, bc_mode, tol);
    Ok(EdgeClassification { bc_mode, interior, periodic, gamma1, dirichlet, ridges })
}

fn order_x(p: Point, q: Point) -> [Point; 2] {
    if p[0] <= q[0] {
        [p, q]
    } else {
        [q, p]
    }
}

fn vertex_at(mesh: &Mesh, p: Point, tol: f64) -> usize {
    let n = mesh.divisions;
    let i = ((p[0] - mesh.domain.a) / mesh.domain.width() * n as f64).round() as usize;
    let j = ((p[1] - mesh.domain.c) / mesh.domain.height() * n as f64).round() as usize;
    let id = j * (n + 1) + i;
    debug_assert!((mesh.vertices[id][0] - p[0]).abs() < tol && (mesh.vertices[id][1] - p[1]).abs() < tol);
    id
}

fn build_ridges(mesh: &Mesh, gamma1: &[Gamma1Edge], bc_mode: BcMode, tol: f64) -> Vec<Ridge> {
    let mut ridges = Vec::new();
    for side in [BoundarySide::Bottom, BoundarySide::Top] {
        // Edges of one component, already sorted by x.
        let comp: Vec<usize> = (0..gamma1.len()).filter(|&i| gamma1[i].side == side).collect();
        let m = comp.len();
        let ends = |idx: usize, right_end: bool| {
            let e = &gamma1[idx];
            RidgeSide {
                edge: idx,
                element: e.element,
                point: if right_end { e.endpoints[1] } else { e.endpoints[0] },
                tangent_sign: if right_end { 1.0 } else { -1.0 },
            }
        };
        match bc_mode {
            BcMode::Periodic => {
                // Ridge k sits at the left end of edge k; its plus side is
                // the edge to its left, wrapping around at the fused corner.
                for k in 0..m {
                    let minus = ends(comp[k], false);
                    let plus = ends(comp[(k + m - 1) % m], true);
                    ridges.push(Ridge {
                        vertex: vertex_at(mesh, minus.point, tol),
                        side,
                        plus,
                        minus: Some(minus),
                    });
                }
            }
            BcMode::DirichletLateral => {
                let first = ends(comp[0], false);
                ridges.push(Ridge { vertex: vertex_at(mesh, first.point, tol), side, plus: first, minus: None });
                for k in 1..m {
                    let minus = ends(comp[k], false);
                    let plus = ends(comp[k - 1], true);
                    ridges.push(Ridge { vertex: vertex_at(mesh, minus.point, tol), side, plus, minus: Some(minus) });
                }
                let last = ends(comp[m - 1], true);
                ridges.push(Ridge { vertex: vertex_at(mesh, last.point, tol), side, plus: last, minus: None });
            }
        }
    }
    ridges
}
