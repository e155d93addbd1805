//! Assembly of the symmetric interior penalty operators.
//!
//! The system operator is
//!
//! ```text
//! A_h(u, v) = B_h(u, v) + α (u, v)_{Γ1} + β b_h(u, v)
//! ```
//!
//! where `B_h` is the SIPG Laplacian over interior and periodic edges and
//! `b_h` the SIPG discretisation of the Laplace–Beltrami operator along the
//! top and bottom boundary, with point jump and average terms at ridges.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{build_structured_mesh, classify_edges, BcMode, BoundarySide, EdgeClassification, InteriorEdge, Mesh, Point, Rectangle, Ridge};
use crate::quadrature::EdgeRule;
use crate::space::DgSpace;
use crate::sparse::{Pattern, SparseMatrix};

/// How the penalty parameter `σ` is derived from the configured `γ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PenaltyMode {
    /// `σ = γ / h`.
    #[default]
    GammaOverH,
    /// `σ = γ`, independent of the mesh.
    FixedSigma,
}

impl std::str::FromStr for PenaltyMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma_over_h" | "gamma-over-h" => Ok(Self::GammaOverH),
            "fixed_sigma" | "fixed-sigma" => Ok(Self::FixedSigma),
            _ => Err(Error::Config(format!("unknown penalty mode `{s}`"))),
        }
    }
}

impl std::fmt::Display for PenaltyMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::GammaOverH => "gamma_over_h",
            Self::FixedSigma => "fixed_sigma",
        })
    }
}

/// Coefficients of the forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormParams {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub sigma: f64,
}

impl FormParams {
    pub fn new(alpha: f64, beta: f64, lambda: f64, gamma: f64, h: f64, mode: PenaltyMode) -> Result<Self> {
        if !(alpha >= 0.0 && beta >= 0.0 && lambda >= 0.0) {
            return Err(Error::Config(format!("alpha, beta, lambda must be >= 0 (got {alpha}, {beta}, {lambda})")));
        }
        if !(gamma > 0.0) {
            return Err(Error::Config(format!("gamma must be > 0 (got {gamma})")));
        }
        let sigma = match mode {
            PenaltyMode::GammaOverH => gamma / h,
            PenaltyMode::FixedSigma => gamma,
        };
        Ok(Self { alpha, beta, lambda, gamma, sigma })
    }
}

/// Mesh, edge sets, space and the shared sparsity pattern of one run.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub mesh: Mesh,
    pub edges: EdgeClassification,
    pub space: DgSpace,
    pub pattern: Arc<Pattern>,
}

impl Discretization {
    pub fn new(level: u32, domain: Rectangle, p: usize, bc_mode: BcMode) -> Result<Self> {
        let mesh = build_structured_mesh(level, domain);
        Self::from_mesh(mesh, p, bc_mode)
    }

    pub fn from_mesh(mesh: Mesh, p: usize, bc_mode: BcMode) -> Result<Self> {
        let edges = classify_edges(&mesh, bc_mode)?;
        let space = DgSpace::new(&mesh, p)?;
        let couplings = edges
            .jump_edges()
            .map(|e| (e.plus, e.minus))
            .chain(edges.ridges.iter().filter_map(|r| r.minus.map(|m| (r.plus.element, m.element))));
        let pattern = Arc::new(Pattern::from_block_couplings(mesh.n_triangles(), space.n_local, couplings));
        Ok(Self { mesh, edges, space, pattern })
    }

    pub fn n_dofs(&self) -> usize {
        self.space.n_dofs()
    }

    pub fn bc_mode(&self) -> BcMode {
        self.edges.bc_mode
    }

    pub fn h(&self) -> f64 {
        self.mesh.h
    }

    fn zeros(&self) -> SparseMatrix {
        SparseMatrix::zeros(self.pattern.clone())
    }
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn lerp(p: Point, q: Point, s: f64) -> Point {
    [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]
}

/// Basis values and physical gradients of one element at one point.
struct Trace {
    values: Vec<f64>,
    grads: Vec<Point>,
}

impl Trace {
    fn new(n: usize) -> Self {
        Self { values: vec![0.0; n], grads: vec![[0.0; 2]; n] }
    }

    fn at(&mut self, space: &DgSpace, element: usize, x: Point) -> &Self {
        space.eval_basis(element, x, &mut self.values, &mut self.grads);
        self
    }
}

/// Element volume integrals: `(∇φ_i, ∇φ_j)_T` when `stiffness`, else
/// `(φ_i, φ_j)_T`.
fn element_blocks(disc: &Discretization, stiffness: bool) -> SparseMatrix {
    let space = &disc.space;
    let n = space.n_local;
    let mut m = disc.zeros();
    let mut local = vec![0.0; n * n];
    let mut tr = Trace::new(n);
    for t in 0..space.n_elements {
        local.iter_mut().for_each(|v| *v = 0.0);
        let geo = &space.geometry[t];
        let jac = geo.det.abs();
        for (xi, w) in space.operator_rule.iter() {
            tr.at(space, t, geo.to_physical(*xi));
            for i in 0..n {
                for j in 0..n {
                    local[i * n + j] += w * jac
                        * if stiffness { dot(tr.grads[i], tr.grads[j]) } else { tr.values[i] * tr.values[j] };
                }
            }
        }
        let o = space.dof_offset(t);
        m.add_block(o, o, &local, n);
    }
    m
}

/// Adds the jump/average/penalty terms of one two-sided edge.
fn add_jump_edge(m: &mut SparseMatrix, space: &DgSpace, rule: &EdgeRule, edge: &InteriorEdge, sigma: f64) {
    let n = space.n_local;
    let [p, q] = edge.endpoints;
    let len = edge.length();
    let nrm = edge.normal;
    let elems = [edge.plus, edge.minus];
    let signs = [1.0, -1.0];
    let mut blocks = vec![vec![0.0; n * n]; 4];
    let mut tp = Trace::new(n);
    let mut tm = Trace::new(n);
    for (s, w) in rule.iter() {
        let xp = lerp(p, q, s[0]);
        let xm = [xp[0] + edge.shift[0], xp[1] + edge.shift[1]];
        tp.at(space, edge.plus, xp);
        tm.at(space, edge.minus, xm);
        let traces = [&tp, &tm];
        let wl = w * len;
        for a in 0..2 {
            for b in 0..2 {
                let (ta, tb) = (traces[a], traces[b]);
                let blk = &mut blocks[2 * a + b];
                for i in 0..n {
                    let (vi, dni) = (ta.values[i], dot(nrm, ta.grads[i]));
                    for j in 0..n {
                        let (vj, dnj) = (tb.values[j], dot(nrm, tb.grads[j]));
                        blk[i * n + j] += wl
                            * (-signs[a] * vi * 0.5 * dnj - signs[b] * vj * 0.5 * dni
                                + sigma * signs[a] * signs[b] * vi * vj);
                    }
                }
            }
        }
    }
    for a in 0..2 {
        for b in 0..2 {
            m.add_block(space.dof_offset(elems[a]), space.dof_offset(elems[b]), &blocks[2 * a + b], n);
        }
    }
}

/// `B_h`: broken stiffness plus SIPG terms on interior and periodic edges.
pub fn assemble_bulk_form(disc: &Discretization, params: &FormParams) -> SparseMatrix {
    let mut m = element_blocks(disc, true);
    for e in disc.edges.jump_edges() {
        add_jump_edge(&mut m, &disc.space, &disc.space.operator_edge_rule, e, params.sigma);
    }
    m
}

/// Adds the SIPG terms of a two-sided ridge, unscaled by `β`.
fn add_ridge(m: &mut SparseMatrix, space: &DgSpace, ridge: &Ridge, sigma: f64) {
    let n = space.n_local;
    let Some(minus) = ridge.minus else { return };
    let sides = [ridge.plus, minus];
    let mut traces = [Trace::new(n), Trace::new(n)];
    for (tr, side) in traces.iter_mut().zip(&sides) {
        tr.at(space, side.element, side.point);
    }
    let mut blk = vec![0.0; n * n];
    for a in 0..2 {
        for b in 0..2 {
            let (na, nb) = (sides[a].tangent_sign, sides[b].tangent_sign);
            let (ta, tb) = (&traces[a], &traces[b]);
            for i in 0..n {
                for j in 0..n {
                    // tangent is ±e_x on the horizontal boundary
                    blk[i * n + j] = -ta.values[i] * 0.5 * na * tb.grads[j][0]
                        - tb.values[j] * 0.5 * nb * ta.grads[i][0]
                        + sigma * na * nb * ta.values[i] * tb.values[j];
                }
            }
            m.add_block(space.dof_offset(sides[a].element), space.dof_offset(sides[b].element), &blk, n);
        }
    }
}

/// `b_h`: tangential stiffness on the top/bottom edges plus the ridge
/// terms. In Dirichlet mode the one-sided corner ridges are left to
/// [`assemble_dirichlet_terms`].
pub fn assemble_surface_form(disc: &Discretization, params: &FormParams) -> SparseMatrix {
    let mut m = assemble_tangential_stiffness(disc);
    for r in &disc.edges.ridges {
        add_ridge(&mut m, &disc.space, r, params.sigma);
    }
    m
}

/// `(∇_Γ φ_i, ∇_Γ φ_j)` summed over the top and bottom edges.
pub fn assemble_tangential_stiffness(disc: &Discretization) -> SparseMatrix {
    let space = &disc.space;
    let n = space.n_local;
    let mut m = disc.zeros();
    let mut local = vec![0.0; n * n];
    let mut tr = Trace::new(n);
    for e in &disc.edges.gamma1 {
        local.iter_mut().for_each(|v| *v = 0.0);
        let [p, q] = e.endpoints;
        let len = e.length();
        let tau = [(q[0] - p[0]) / len, (q[1] - p[1]) / len];
        for (s, w) in space.operator_edge_rule.iter() {
            tr.at(space, e.element, lerp(p, q, s[0]));
            for i in 0..n {
                for j in 0..n {
                    local[i * n + j] += w * len * dot(tau, tr.grads[i]) * dot(tau, tr.grads[j]);
                }
            }
        }
        let o = space.dof_offset(e.element);
        m.add_block(o, o, &local, n);
    }
    m
}

/// `(φ_i, φ_j)_{Γ1}`.
pub fn assemble_boundary_mass(disc: &Discretization) -> SparseMatrix {
    let space = &disc.space;
    let n = space.n_local;
    let mut m = disc.zeros();
    let mut local = vec![0.0; n * n];
    let mut tr = Trace::new(n);
    for e in &disc.edges.gamma1 {
        local.iter_mut().for_each(|v| *v = 0.0);
        let [p, q] = e.endpoints;
        let len = e.length();
        for (s, w) in space.operator_edge_rule.iter() {
            tr.at(space, e.element, lerp(p, q, s[0]));
            for i in 0..n {
                for j in 0..n {
                    local[i * n + j] += w * len * tr.values[i] * tr.values[j];
                }
            }
        }
        let o = space.dof_offset(e.element);
        m.add_block(o, o, &local, n);
    }
    m
}

/// `(φ_i, φ_j)_Ω`, block diagonal.
pub fn assemble_domain_mass(disc: &Discretization) -> SparseMatrix {
    element_blocks(disc, false)
}

/// `(φ_i, φ_j)_Ω + λ (φ_i, φ_j)_{Γ1}`.
pub fn assemble_mass(disc: &Discretization, lambda: f64) -> SparseMatrix {
    assemble_domain_mass(disc).add_scaled(lambda, &assemble_boundary_mass(disc))
}

/// `𝒜_h = B_h + α C + β b_h` (without lateral Dirichlet terms).
pub fn assemble_system(disc: &Discretization, params: &FormParams) -> SparseMatrix {
    assemble_bulk_form(disc, params)
        .add_scaled(params.alpha, &assemble_boundary_mass(disc))
        .add_scaled(params.beta, &assemble_surface_form(disc, params))
}

/// Nitsche terms on the lateral edges and one-sided ridge terms (scaled by
/// `β`) at the corners of the top and bottom boundary, for a Dirichlet datum
/// `u_d`. Returns the matrix contribution and the matching right-hand side.
pub fn assemble_dirichlet_terms(
    disc: &Discretization,
    params: &FormParams,
    u_d: &dyn Fn(Point) -> f64,
) -> Result<(SparseMatrix, Vec<f64>)> {
    let m = assemble_dirichlet_matrix(disc, params)?;
    let rhs = assemble_dirichlet_rhs(disc, params, u_d)?;
    Ok((m, rhs))
}

pub fn assemble_dirichlet_matrix(disc: &Discretization, params: &FormParams) -> Result<SparseMatrix> {
    if disc.bc_mode() != BcMode::DirichletLateral {
        return Err(Error::NotDirichletMode);
    }
    let space = &disc.space;
    let n = space.n_local;
    let sigma = params.sigma;
    let mut m = disc.zeros();
    let mut local = vec![0.0; n * n];
    let mut tr = Trace::new(n);
    let nitsche = |local: &mut [f64], tr: &Trace, nrm: Point, w: f64| {
        for i in 0..n {
            let (vi, dni) = (tr.values[i], dot(nrm, tr.grads[i]));
            for j in 0..n {
                let (vj, dnj) = (tr.values[j], dot(nrm, tr.grads[j]));
                local[i * n + j] += w * (-vi * dnj - vj * dni + sigma * vi * vj);
            }
        }
    };
    for e in &disc.edges.dirichlet {
        local.iter_mut().for_each(|v| *v = 0.0);
        let [p, q] = e.endpoints;
        let len = e.length();
        for (s, w) in space.operator_edge_rule.iter() {
            tr.at(space, e.element, lerp(p, q, s[0]));
            nitsche(&mut local, &tr, e.normal, w * len);
        }
        let o = space.dof_offset(e.element);
        m.add_block(o, o, &local, n);
    }
    for r in disc.edges.ridges.iter().filter(|r| r.is_dirichlet()) {
        local.iter_mut().for_each(|v| *v = 0.0);
        tr.at(space, r.plus.element, r.plus.point);
        nitsche(&mut local, &tr, [r.plus.tangent_sign, 0.0], params.beta);
        let o = space.dof_offset(r.plus.element);
        m.add_block(o, o, &local, n);
    }
    Ok(m)
}

pub fn assemble_dirichlet_rhs(disc: &Discretization, params: &FormParams, u_d: &dyn Fn(Point) -> f64) -> Result<Vec<f64>> {
    if disc.bc_mode() != BcMode::DirichletLateral {
        return Err(Error::NotDirichletMode);
    }
    let space = &disc.space;
    let n = space.n_local;
    let sigma = params.sigma;
    let mut rhs = vec![0.0; space.n_dofs()];
    let mut tr = Trace::new(n);
    for e in &disc.edges.dirichlet {
        let [p, q] = e.endpoints;
        let len = e.length();
        let o = space.dof_offset(e.element);
        for (s, w) in space.data_edge_rule.iter() {
            let x = lerp(p, q, s[0]);
            let g = u_d(x);
            if g == 0.0 {
                continue;
            }
            tr.at(space, e.element, x);
            for i in 0..n {
                rhs[o + i] += w * len * g * (-dot(e.normal, tr.grads[i]) + sigma * tr.values[i]);
            }
        }
    }
    for r in disc.edges.ridges.iter().filter(|r| r.is_dirichlet()) {
        let g = u_d(r.plus.point);
        if g == 0.0 {
            continue;
        }
        tr.at(space, r.plus.element, r.plus.point);
        let o = space.dof_offset(r.plus.element);
        for i in 0..n {
            rhs[o + i] += params.beta * g * (-r.plus.tangent_sign * tr.grads[i][0] + sigma * tr.values[i]);
        }
    }
    Ok(rhs)
}

/// `(f, φ_i)_Ω + (g, φ_i)_{Γ1}`, with `g` told which boundary side it is
/// evaluated on.
pub fn assemble_load(disc: &Discretization, f: &dyn Fn(Point) -> f64, g: &dyn Fn(Point, BoundarySide) -> f64) -> Vec<f64> {
    let space = &disc.space;
    let n = space.n_local;
    let mut load = vec![0.0; space.n_dofs()];
    let mut tr = Trace::new(n);
    for t in 0..space.n_elements {
        let geo = &space.geometry[t];
        let jac = geo.det.abs();
        let o = space.dof_offset(t);
        for (xi, w) in space.data_rule.iter() {
            let x = geo.to_physical(*xi);
            let fx = f(x);
            if fx == 0.0 {
                continue;
            }
            // at the quadrature point the reference coordinates are known
            space.basis.eval_into(*xi, &mut tr.values, &mut tr.grads);
            for i in 0..n {
                load[o + i] += w * jac * fx * tr.values[i];
            }
        }
    }
    for e in &disc.edges.gamma1 {
        let [p, q] = e.endpoints;
        let len = e.length();
        let o = space.dof_offset(e.element);
        for (s, w) in space.data_edge_rule.iter() {
            let x = lerp(p, q, s[0]);
            let gx = g(x, e.side);
            if gx == 0.0 {
                continue;
            }
            tr.at(space, e.element, x);
            for i in 0..n {
                load[o + i] += w * len * gx * tr.values[i];
            }
        }
    }
    load
}

/// All operators of one run, assembled once.
#[derive(Clone, Debug)]
pub struct Operators {
    pub params: FormParams,
    pub bulk: SparseMatrix,
    pub surface: SparseMatrix,
    pub boundary_mass: SparseMatrix,
    pub domain_mass: SparseMatrix,
    /// Present in Dirichlet mode.
    pub dirichlet: Option<SparseMatrix>,
    /// `𝒜_h`, including the Dirichlet contribution when present.
    pub system: SparseMatrix,
    /// `M = M_Ω + λ M_{Γ1}`.
    pub mass: SparseMatrix,
}

impl Operators {
    pub fn assemble(disc: &Discretization, params: FormParams) -> Result<Self> {
        let bulk = assemble_bulk_form(disc, &params);
        let surface = assemble_surface_form(disc, &params);
        let boundary_mass = assemble_boundary_mass(disc);
        let domain_mass = assemble_domain_mass(disc);
        let mut system = bulk.add_scaled(params.alpha, &boundary_mass).add_scaled(params.beta, &surface);
        let dirichlet = match disc.bc_mode() {
            BcMode::Periodic => None,
            BcMode::DirichletLateral => {
                let d = assemble_dirichlet_matrix(disc, &params)?;
                system = system.add_scaled(1.0, &d);
                Some(d)
            }
        };
        let mass = domain_mass.add_scaled(params.lambda, &boundary_mass);
        Ok(Self { params, bulk, surface, boundary_mass, domain_mass, dirichlet, system, mass })
    }
}
