//! C⁰ finite elements for bounded-Hessian velocity fields: P2 Lagrange and
//! P3 Hermite triangles, their global numbering, interpolation, and the
//! linear maps from degrees of freedom to curvatures and to normal-slope
//! jumps on edges.

pub mod basis;
pub mod quadrature;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::mesh::{orientation, Mesh, Point, UNTAGGED};
use crate::yield_criteria::Sym2;

pub use basis::{LocalBasis, ShapeValues};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum FemError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no boundary condition for boundary region `{0}`")]
    MissingBoundaryCondition(String),
    #[error("degenerate Dirichlet boundary: {0}")]
    DegenerateDirichlet(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementFamily {
    LagrangeP2,
    HermiteP3,
}

impl ElementFamily {
    pub fn local_dof_count(self) -> usize {
        match self {
            ElementFamily::LagrangeP2 => 6,
            ElementFamily::HermiteP3 => 10,
        }
    }

    pub fn degree(self) -> usize {
        match self {
            ElementFamily::LagrangeP2 => 2,
            ElementFamily::HermiteP3 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementFamily::LagrangeP2 => "p2_lagrange",
            ElementFamily::HermiteP3 => "p3_hermite",
        }
    }
}

impl fmt::Display for ElementFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Shape functions on the reference triangle `(0,0), (1,0), (0,1)` at a
/// barycentric point.
///
/// P2 local order: vertices 1–3, then midpoints of edges 12, 23, 31.
/// Hermite local order: vertex values 1–3, centroid value, then
/// `(∂x, ∂y)` at vertices 1–3.
pub fn shape_eval(family: ElementFamily, barycentric: [f64; 3]) -> Result<ShapeValues, FemError> {
    let sum: f64 = barycentric.iter().sum();
    if barycentric.iter().any(|&b| !(b >= -1e-12)) || (sum - 1.0).abs() > 1e-12 {
        return Err(FemError::InvalidArgument(format!(
            "barycentric coordinates {barycentric:?} must be nonnegative and sum to 1"
        )));
    }
    let basis = LocalBasis::new(family, [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
    Ok(basis.eval([barycentric[1], barycentric[2]]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DofKind {
    VertexValue,
    VertexGradientX,
    VertexGradientY,
    EdgeMidpointValue,
    BubbleValue,
}

/// Global numbering.
///
/// P2: vertex values `0..V`, then edge midpoints `V + e`.
/// Hermite: `(u, ∂x u, ∂y u)` at vertex `v` are `3v, 3v + 1, 3v + 2`; the
/// bubble of triangle `t` is `3V + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub family: ElementFamily,
    pub num_dofs: usize,
    /// `local_to_global[t]` in the local order of [`shape_eval`].
    pub local_to_global: Vec<Vec<usize>>,
    pub kinds: Vec<DofKind>,
    pub locations: Vec<Point>,
}

pub fn build_dof_map(family: ElementFamily, mesh: &Mesh) -> DofMap {
    let nv = mesh.num_vertices();
    match family {
        ElementFamily::LagrangeP2 => {
            let ne = mesh.num_edges();
            let mut kinds = vec![DofKind::VertexValue; nv];
            kinds.extend(std::iter::repeat_n(DofKind::EdgeMidpointValue, ne));
            let mut locations = mesh.vertices.clone();
            locations.extend(mesh.edges.iter().map(|e| e.midpoint(mesh)));
            let local_to_global = mesh
                .triangles
                .iter()
                .zip(&mesh.triangle_edges)
                .map(|(tri, te)| vec![tri[0], tri[1], tri[2], nv + te[2], nv + te[0], nv + te[1]])
                .collect();
            DofMap {
                family,
                num_dofs: nv + ne,
                local_to_global,
                kinds,
                locations,
            }
        }
        ElementFamily::HermiteP3 => {
            let nt = mesh.num_triangles();
            let mut kinds = Vec::with_capacity(3 * nv + nt);
            let mut locations = Vec::with_capacity(3 * nv + nt);
            for v in &mesh.vertices {
                kinds.extend([DofKind::VertexValue, DofKind::VertexGradientX, DofKind::VertexGradientY]);
                locations.extend([*v, *v, *v]);
            }
            for t in 0..nt {
                kinds.push(DofKind::BubbleValue);
                locations.push(mesh.centroid(t));
            }
            let local_to_global = mesh
                .triangles
                .iter()
                .enumerate()
                .map(|(t, tri)| {
                    let mut l = vec![3 * tri[0], 3 * tri[1], 3 * tri[2], 3 * nv + t];
                    for &v in tri {
                        l.push(3 * v + 1);
                        l.push(3 * v + 2);
                    }
                    l
                })
                .collect();
            DofMap {
                family,
                num_dofs: 3 * nv + nt,
                local_to_global,
                kinds,
                locations,
            }
        }
    }
}

/// A smooth function with derivatives up to second order.
pub trait SmoothFunction {
    fn value(&self, x: Point) -> f64;
    fn gradient(&self, x: Point) -> [f64; 2];
    fn hessian(&self, x: Point) -> Sym2;
}

/// [`SmoothFunction`] from three closures.
pub struct Analytic<F, G, H> {
    pub value: F,
    pub gradient: G,
    pub hessian: H,
}

impl<F, G, H> SmoothFunction for Analytic<F, G, H>
where
    F: Fn(Point) -> f64,
    G: Fn(Point) -> [f64; 2],
    H: Fn(Point) -> Sym2,
{
    fn value(&self, x: Point) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: Point) -> [f64; 2] {
        (self.gradient)(x)
    }
    fn hessian(&self, x: Point) -> Sym2 {
        (self.hessian)(x)
    }
}

/// Element family, numbering and per-triangle bases on a mesh.
#[derive(Debug, Clone)]
pub struct ElementSpace<'m> {
    pub mesh: &'m Mesh,
    pub family: ElementFamily,
    pub dofs: DofMap,
    pub bases: Vec<LocalBasis>,
}

/// Value, gradient and Hessian of a finite element function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEval {
    pub value: f64,
    pub gradient: [f64; 2],
    pub hessian: Sym2,
}

impl<'m> ElementSpace<'m> {
    pub fn new(family: ElementFamily, mesh: &'m Mesh) -> Self {
        let bases = (0..mesh.num_triangles())
            .map(|t| LocalBasis::new(family, mesh.corners(t)))
            .collect();
        ElementSpace {
            mesh,
            family,
            dofs: build_dof_map(family, mesh),
            bases,
        }
    }

    pub fn num_dofs(&self) -> usize {
        self.dofs.num_dofs
    }

    /// Evaluates the function with global `dofs` on triangle `t` at `x`.
    pub fn eval(&self, dofs: &[f64], t: usize, x: Point) -> PointEval {
        let sv = self.bases[t].eval(x);
        let mut out = PointEval {
            value: 0.0,
            gradient: [0.0; 2],
            hessian: [0.0; 3],
        };
        for (k, &g) in self.dofs.local_to_global[t].iter().enumerate() {
            let c = dofs[g];
            out.value += c * sv.values[k];
            out.gradient[0] += c * sv.gradients[k][0];
            out.gradient[1] += c * sv.gradients[k][1];
            for r in 0..3 {
                out.hessian[r] += c * sv.hessians[k][r];
            }
        }
        out
    }

    /// Global degrees of freedom of the interpolant of `u`.
    pub fn interpolate(&self, u: &impl SmoothFunction) -> Vec<f64> {
        let mut d = vec![0.0; self.num_dofs()];
        for (g, (&kind, &x)) in self.dofs.kinds.iter().zip(&self.dofs.locations).enumerate() {
            d[g] = match kind {
                DofKind::VertexValue | DofKind::EdgeMidpointValue | DofKind::BubbleValue => u.value(x),
                DofKind::VertexGradientX => u.gradient(x)[0],
                DofKind::VertexGradientY => u.gradient(x)[1],
            };
        }
        d
    }

    /// Maps an FE function on triangle `t` back to its own nodal variables;
    /// used to check the projection property.
    pub fn interpolate_fe(&self, dofs: &[f64]) -> Vec<f64> {
        let mut d = vec![0.0; self.num_dofs()];
        let mut owner = vec![usize::MAX; self.num_dofs()];
        for t in 0..self.mesh.num_triangles() {
            for &g in &self.dofs.local_to_global[t] {
                if owner[g] == usize::MAX {
                    owner[g] = t;
                }
            }
        }
        for g in 0..self.num_dofs() {
            let e = self.eval(dofs, owner[g], self.dofs.locations[g]);
            d[g] = match self.dofs.kinds[g] {
                DofKind::VertexGradientX => e.gradient[0],
                DofKind::VertexGradientY => e.gradient[1],
                _ => e.value,
            };
        }
        d
    }
}

/// Convenience wrapper: [`ElementSpace::interpolate`] on a fresh space.
pub fn interpolate(family: ElementFamily, mesh: &Mesh, u: &impl SmoothFunction) -> Vec<f64> {
    ElementSpace::new(family, mesh).interpolate(u)
}

/// `(w11_error, hessian_tv_error)` of the interpolant:
/// `Σ_T ∫_T |u − Iu| + |∇u − ∇Iu|` and
/// `Σ_T ∫_T |∇²u − ∇²Iu|_F + Σ_e ∫_e |⟦∇Iu · ν⟧|` over interior edges.
pub fn interpolation_errors(family: ElementFamily, mesh: &Mesh, u: &impl SmoothFunction) -> (f64, f64) {
    let space = ElementSpace::new(family, mesh);
    let d = space.interpolate(u);
    let rule = quadrature::triangle_degree5();
    let mut w11 = 0.0;
    let mut tv = 0.0;
    for t in 0..mesh.num_triangles() {
        let c = mesh.corners(t);
        let area = mesh.area(t);
        for (b, w) in &rule {
            let x = bary_point(c, *b);
            let e = space.eval(&d, t, x);
            let g = u.gradient(x);
            let h = u.hessian(x);
            w11 += w * area * ((u.value(x) - e.value).abs() + (g[0] - e.gradient[0]).hypot(g[1] - e.gradient[1]));
            let dh = [h[0] - e.hessian[0], h[1] - e.hessian[1], h[2] - e.hessian[2]];
            tv += w * area * crate::yield_criteria::frobenius(dh);
        }
    }
    let seg = quadrature::segment_gauss5();
    for edge in mesh.edges.iter().filter(|e| !e.is_boundary()) {
        let (lo, hi) = (edge.triangles[0].unwrap(), edge.triangles[1].unwrap());
        let a = mesh.vertices[edge.vertices[0]];
        let b = mesh.vertices[edge.vertices[1]];
        for &(s, w) in &seg {
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let jump = normal_jump(&space, &d, lo, hi, x, edge.normal);
            tv += w * edge.length * jump.abs();
        }
    }
    (w11, tv)
}

pub(crate) fn bary_point(c: [Point; 3], b: [f64; 3]) -> Point {
    [
        b[0] * c[0][0] + b[1] * c[1][0] + b[2] * c[2][0],
        b[0] * c[0][1] + b[1] * c[1][1] + b[2] * c[2][1],
    ]
}

fn normal_jump(space: &ElementSpace, d: &[f64], lo: usize, hi: usize, x: Point, n: Point) -> f64 {
    let gl = space.eval(d, lo, x).gradient;
    let gh = space.eval(d, hi, x).gradient;
    (gh[0] - gl[0]) * n[0] + (gh[1] - gl[1]) * n[1]
}

/// Kind of a boundary region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BcKind {
    /// `u = 0`.
    Dirichlet,
    /// `u = 0` plus the rotation penalty on the edge.
    Clamped,
    Free,
    /// `u` free; the normal slope is penalized like a clamped edge.
    Symmetry,
}

impl BcKind {
    pub fn fixes_value(self) -> bool {
        matches!(self, BcKind::Dirichlet | BcKind::Clamped)
    }

    /// Whether the edge carries a slope dissipation term.
    pub fn penalizes_slope(self) -> bool {
        matches!(self, BcKind::Clamped | BcKind::Symmetry)
    }

    pub fn name(self) -> &'static str {
        match self {
            BcKind::Dirichlet => "dirichlet",
            BcKind::Clamped => "clamped",
            BcKind::Free => "free",
            BcKind::Symmetry => "symmetry",
        }
    }
}

/// Boundary condition kind per region label.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundaryConditions {
    pub regions: BTreeMap<String, BcKind>,
}

impl BoundaryConditions {
    pub fn new(pairs: impl IntoIterator<Item = (impl Into<String>, BcKind)>) -> Self {
        BoundaryConditions {
            regions: pairs.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    /// Kind of every edge (`None` for interior edges).
    pub fn edge_kinds(&self, mesh: &Mesh) -> Result<Vec<Option<BcKind>>, FemError> {
        mesh.edges
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                if !edge.is_boundary() {
                    return Ok(None);
                }
                let tag = mesh.tag(e).unwrap_or(UNTAGGED);
                self.regions
                    .get(tag)
                    .copied()
                    .map(Some)
                    .ok_or_else(|| FemError::MissingBoundaryCondition(tag.to_string()))
            })
            .collect()
    }
}

/// Linear map from free columns to all global dofs that enforces `u = 0` on
/// the Dirichlet boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletReduction {
    pub num_free: usize,
    /// `expand[g]` lists `(free column, coefficient)`; empty for fixed dofs.
    pub expand: Vec<Vec<(usize, f64)>>,
}

impl DirichletReduction {
    pub fn expand_vector(&self, free: &[f64]) -> Vec<f64> {
        self.expand
            .iter()
            .map(|terms| terms.iter().map(|&(j, c)| c * free[j]).sum())
            .collect()
    }

    /// Row over global dofs → row over free columns (sorted, merged).
    pub fn reduce_row(&self, row: &[(usize, f64)]) -> Vec<(usize, f64)> {
        let mut out: BTreeMap<usize, f64> = BTreeMap::new();
        for &(g, v) in row {
            for &(j, c) in &self.expand[g] {
                *out.entry(j).or_insert(0.0) += c * v;
            }
        }
        out.into_iter().filter(|&(_, v)| v != 0.0).collect()
    }

    pub fn is_fixed(&self, g: usize) -> bool {
        self.expand[g].is_empty()
    }
}

/// Builds the Dirichlet reduction, checking that the Dirichlet boundary
/// contains three non-aligned points.
pub fn dirichlet_reduction(space: &ElementSpace, kinds: &[Option<BcKind>]) -> Result<DirichletReduction, FemError> {
    let mesh = space.mesh;
    let nv = mesh.num_vertices();
    let mut fixed = vec![false; space.num_dofs()];
    // Unit tangents of Dirichlet edges at each vertex.
    let mut tangents: Vec<Vec<Point>> = vec![Vec::new(); nv];
    let mut support: Vec<usize> = Vec::new();
    for (e, edge) in mesh.edges.iter().enumerate() {
        if !kinds[e].is_some_and(BcKind::fixes_value) {
            continue;
        }
        let t = edge.tangent(mesh);
        for &v in &edge.vertices {
            tangents[v].push(t);
            support.push(v);
        }
        match space.family {
            ElementFamily::LagrangeP2 => {
                fixed[edge.vertices[0]] = true;
                fixed[edge.vertices[1]] = true;
                fixed[nv + e] = true;
            }
            ElementFamily::HermiteP3 => {
                fixed[3 * edge.vertices[0]] = true;
                fixed[3 * edge.vertices[1]] = true;
            }
        }
    }
    support.sort_unstable();
    support.dedup();
    check_support(mesh, &support)?;

    let mut expand: Vec<Vec<(usize, f64)>> = vec![Vec::new(); space.num_dofs()];
    let mut next = 0;
    let mut handled = vec![false; space.num_dofs()];
    for g in 0..space.num_dofs() {
        if handled[g] {
            continue;
        }
        handled[g] = true;
        let kind = space.dofs.kinds[g];
        if kind == DofKind::VertexGradientX && !tangents[g / 3].is_empty() {
            // Gradient constrained along the Dirichlet tangents.
            let v = g / 3;
            handled[g + 1] = true;
            let t0 = tangents[v][0];
            let independent = tangents[v].iter().any(|t| (t0[0] * t[1] - t0[1] * t[0]).abs() > 1e-9);
            if !independent {
                let n = [-t0[1], t0[0]];
                expand[g] = vec![(next, n[0])];
                expand[g + 1] = vec![(next, n[1])];
                next += 1;
            }
            continue;
        }
        if !fixed[g] {
            expand[g] = vec![(next, 1.0)];
            next += 1;
        }
    }
    Ok(DirichletReduction { num_free: next, expand })
}

fn check_support(mesh: &Mesh, support: &[usize]) -> Result<(), FemError> {
    let p: Vec<Point> = support.iter().map(|&v| mesh.vertices[v]).collect();
    if let Some(&a) = p.first() {
        if let Some(&b) = p.iter().find(|&&q| q != a) {
            if p.iter().any(|&c| orientation(a, b, c) != 0.0) {
                return Ok(());
            }
        }
    }
    Err(FemError::DegenerateDirichlet(format!(
        "the Dirichlet boundary has {} support vertices and no three of them are non-aligned",
        support.len()
    )))
}

/// One curvature quadrature point: `κ = Σ_k rows[r][k] · u[dofs[k]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePoint {
    pub triangle: usize,
    pub position: Point,
    pub weight: f64,
    /// `3 × n_local`, row-major.
    pub matrix: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureOperator {
    pub points: Vec<CurvaturePoint>,
}

impl CurvatureOperator {
    pub fn apply(&self, space: &ElementSpace, dofs: &[f64], q: usize) -> Sym2 {
        let p = &self.points[q];
        let l2g = &space.dofs.local_to_global[p.triangle];
        let n = l2g.len();
        let mut k = [0.0; 3];
        for r in 0..3 {
            k[r] = (0..n).map(|j| p.matrix[r * n + j] * dofs[l2g[j]]).sum();
        }
        k
    }
}

/// Triangle rule of the curvature term: centroid for P2 (constant
/// Hessian), vertices with equal weights for Hermite (affine Hessian).
pub fn build_curvature_operator(space: &ElementSpace) -> CurvatureOperator {
    let mesh = space.mesh;
    let mut points = Vec::new();
    for t in 0..mesh.num_triangles() {
        let area = mesh.area(t);
        let sites: Vec<(Point, f64)> = match space.family {
            ElementFamily::LagrangeP2 => vec![(mesh.centroid(t), area)],
            ElementFamily::HermiteP3 => mesh.corners(t).iter().map(|&c| (c, area / 3.0)).collect(),
        };
        for (x, w) in sites {
            let sv = space.bases[t].eval(x);
            let n = sv.values.len();
            let mut matrix = vec![0.0; 3 * n];
            for k in 0..n {
                for r in 0..3 {
                    matrix[r * n + k] = sv.hessians[k][r];
                }
            }
            points.push(CurvaturePoint {
                triangle: t,
                position: x,
                weight: w,
                matrix,
            });
        }
    }
    CurvatureOperator { points }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JumpRule {
    /// Endpoints, weights `|e|/2` (overestimates a convex integrand of an
    /// affine jump).
    Trapezoid,
    /// Single point of weight 1 whose row is `∫_e s`; exact when `s` keeps
    /// one sign.
    Aggregated,
    /// Endpoints and midpoint, weights `|e|/6, 4|e|/6, |e|/6`.
    Simpson,
}

impl JumpRule {
    pub fn name(self) -> &'static str {
        match self {
            JumpRule::Trapezoid => "trapezoid",
            JumpRule::Aggregated => "aggregated_exact",
            JumpRule::Simpson => "simpson",
        }
    }

    /// Whether the rule bounds `∫_e π(s)` from above.
    pub fn overestimates(self) -> bool {
        !matches!(self, JumpRule::Simpson)
    }
}

/// One edge quadrature point: `s = Σ coef · u[dof]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpPoint {
    pub edge: usize,
    pub position: Point,
    pub weight: f64,
    pub rule: JumpRule,
    pub row: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeJumpOperator {
    pub points: Vec<JumpPoint>,
}

impl EdgeJumpOperator {
    pub fn apply(&self, dofs: &[f64], q: usize) -> f64 {
        self.points[q].row.iter().map(|&(g, c)| c * dofs[g]).sum()
    }

    pub fn rules(&self) -> Vec<JumpRule> {
        let mut r: Vec<JumpRule> = self.points.iter().map(|p| p.rule).collect();
        r.sort_by_key(|r| r.name());
        r.dedup();
        r
    }
}

/// Row of `∇u|_T(x) · n` over global dofs.
fn slope_row(space: &ElementSpace, t: usize, x: Point, n: Point, scale: f64, out: &mut BTreeMap<usize, f64>) {
    let sv = space.bases[t].eval(x);
    for (k, &g) in space.dofs.local_to_global[t].iter().enumerate() {
        let v = scale * (sv.gradients[k][0] * n[0] + sv.gradients[k][1] * n[1]);
        *out.entry(g).or_insert(0.0) += v;
    }
}

/// Jump operator on interior edges and on boundary edges whose kind
/// penalizes the slope. `kinds` comes from
/// [`BoundaryConditions::edge_kinds`].
pub fn build_edge_jump_operator(space: &ElementSpace, kinds: &[Option<BcKind>]) -> EdgeJumpOperator {
    let mesh = space.mesh;
    let mut points = Vec::new();
    for (e, edge) in mesh.edges.iter().enumerate() {
        let boundary = edge.is_boundary();
        if boundary && !kinds[e].is_some_and(BcKind::penalizes_slope) {
            continue;
        }
        let a = mesh.vertices[edge.vertices[0]];
        let b = mesh.vertices[edge.vertices[1]];
        let at = |s: f64| [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
        let len = edge.length;
        let sites: Vec<(f64, f64, JumpRule)> = match (space.family, boundary) {
            (ElementFamily::LagrangeP2, _) => {
                vec![
                    (0.0, 0.5 * len, JumpRule::Trapezoid),
                    (1.0, 0.5 * len, JumpRule::Trapezoid),
                ]
            }
            (ElementFamily::HermiteP3, false) => vec![(0.5, 1.0, JumpRule::Aggregated)],
            (ElementFamily::HermiteP3, true) => vec![
                (0.0, len / 6.0, JumpRule::Simpson),
                (0.5, 4.0 * len / 6.0, JumpRule::Simpson),
                (1.0, len / 6.0, JumpRule::Simpson),
            ],
        };
        for (s, weight, rule) in sites {
            let x = at(s);
            let scale = if rule == JumpRule::Aggregated {
                2.0 * len / 3.0
            } else {
                1.0
            };
            let mut row = BTreeMap::new();
            if boundary {
                slope_row(space, edge.first(), x, edge.normal, -scale, &mut row);
            } else {
                slope_row(space, edge.triangles[1].unwrap(), x, edge.normal, scale, &mut row);
                slope_row(space, edge.triangles[0].unwrap(), x, edge.normal, -scale, &mut row);
            }
            let tol = 1e-13 * row.values().fold(0.0f64, |m, v| m.max(v.abs()));
            points.push(JumpPoint {
                edge: e,
                position: x,
                weight,
                rule,
                row: row.into_iter().filter(|&(_, v)| v.abs() > tol).collect(),
            });
        }
    }
    EdgeJumpOperator { points }
}

#[cfg(test)]
mod tests;
