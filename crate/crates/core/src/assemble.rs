//! Discrete kinematic limit-analysis problem as a standard-form conic
//! program.
//!
//! Column layout: free displacement dofs, one weighted curvature triple
//! `κ̃_q = w_q κ_q` per curvature point, one weighted jump `s̃_p = w_p s_p`
//! per jump point (all free), then the local variables of every bulk cone
//! block followed by every edge cone block.
//! Row layout: curvature links `κ̃_q − w_q B_q u = 0`, jump links
//! `s̃_p − w_p J_p u = 0`, bulk block rows, edge block rows, and the
//! normalization `ℓᵀu = 1` last (divided by `‖ℓ‖∞`).
//! The objective is `Σ_q t̃_q + Σ_p t̃_p` with `t̃ ≥ π(κ̃) = w π(κ)` by
//! positive homogeneity, so it equals `Σ_q w_q π(κ_q) + Σ_p w_p π(s_p)`.
//! Weighting keeps every matrix entry of order one independently of the
//! mesh size.
//!
//! Results are reported at a primal point rebuilt from the solver's
//! mechanism: `u` rescaled to `ℓᵀu = 1` exactly, the curvature and jump
//! columns evaluated from `u`, and every block at its minimal value. That
//! point satisfies all equality rows up to rounding, so its objective is
//! the discrete upper bound of its own mechanism.

use std::fmt;

use thiserror::Error;

use crate::conic::{self, dump, Cone, ConicProgram, ConicSolution, CscMatrix, Residuals, Settings, Status};
use crate::expr::Expr;
use crate::fem::{
    build_curvature_operator, build_edge_jump_operator, dirichlet_reduction, quadrature, BoundaryConditions,
    DirichletReduction, ElementFamily, ElementSpace, FemError, JumpRule,
};
use crate::mesh::{Mesh, Point};
use crate::yield_criteria::{
    cone_block_point, edge_block_point, emit_cone_block, emit_edge_block, pi_edge, pi_eval, ConeBlock, Sym2,
    YieldCriterion, YieldError,
};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum AssembleError {
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Yield(#[from] YieldError),
    #[error("load density `{expression}` is not finite at ({}, {})", .point[0], .point[1])]
    LoadEvaluation { expression: String, point: Point },
    #[error("infeasible boundary conditions: every loaded dof is constrained")]
    InfeasibleBcs,
    #[error("solver finished with status {status} (primal {:.3e}, dual {:.3e}, gap {:.3e})", .residuals.primal, .residuals.dual, .residuals.gap)]
    NotOptimal {
        status: Status,
        residuals: Residuals,
        iterations: usize,
    },
    #[error("solution has {found} entries, program has {expected} columns")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Transverse load density.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadSpec {
    UniformPressure(f64),
    Density(Expr),
}

impl LoadSpec {
    fn eval(&self, x: Point) -> Result<f64, AssembleError> {
        match self {
            LoadSpec::UniformPressure(v) => Ok(*v),
            LoadSpec::Density(e) => {
                let v = e.eval(x[0], x[1]);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(AssembleError::LoadEvaluation {
                        expression: e.source().to_string(),
                        point: x,
                    })
                }
            }
        }
    }

    pub fn scaled(&self, c: f64) -> LoadSpec {
        match self {
            LoadSpec::UniformPressure(v) => LoadSpec::UniformPressure(c * v),
            LoadSpec::Density(e) => LoadSpec::Density(
                Expr::parse(&format!("({}) * ({c:?})", e.source())).expect("scaling a valid expression stays valid"),
            ),
        }
    }
}

impl fmt::Display for LoadSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadSpec::UniformPressure(v) => write!(f, "uniform pressure {v}"),
            LoadSpec::Density(e) => write!(f, "density {}", e.source()),
        }
    }
}

/// Load vector over global dofs: `ℓ_g = ∫_Ω L φ_g`, by the degree-6
/// triangle rule.
pub fn assemble_load(space: &ElementSpace, load: &LoadSpec) -> Result<Vec<f64>, AssembleError> {
    let mesh = space.mesh;
    let rule = quadrature::triangle_degree6();
    let mut ell = vec![0.0; space.num_dofs()];
    for t in 0..mesh.num_triangles() {
        let c = mesh.corners(t);
        let area = mesh.area(t);
        for (b, w) in &rule {
            let x = [
                b[0] * c[0][0] + b[1] * c[1][0] + b[2] * c[2][0],
                b[0] * c[0][1] + b[1] * c[1][1] + b[2] * c[2][1],
            ];
            let l = load.eval(x)?;
            let sv = space.bases[t].eval(x);
            for (k, &g) in space.dofs.local_to_global[t].iter().enumerate() {
                ell[g] += w * area * l * sv.values[k];
            }
        }
    }
    Ok(ell)
}

/// Whether the discrete objective is a guaranteed upper bound of the
/// continuous one at every feasible point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rigor {
    Strict,
    QuadratureLimited,
}

impl fmt::Display for Rigor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rigor::Strict => "strict",
            Rigor::QuadratureLimited => "quadrature-limited",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub element: ElementFamily,
    pub criterion: &'static str,
    pub curvature_rule: &'static str,
    pub jump_rules: Vec<JumpRule>,
    pub rigor: Rigor,
}

/// Counts describing the assembled program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProblemSize {
    pub rows: usize,
    pub cols: usize,
    pub cones: usize,
    pub nnz: usize,
    pub triangles: usize,
    pub edges: usize,
    pub total_dofs: usize,
    pub free_dofs: usize,
    pub curvature_points: usize,
    pub jump_points: usize,
}

/// Bulk dissipation term at one curvature point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTerm {
    pub triangle: usize,
    pub position: Point,
    pub weight: f64,
    /// `B_q` over free columns, one row per curvature component.
    pub rows: [Vec<(usize, f64)>; 3],
    /// Column of `w κ11`; `w κ22` and `w κ12` follow.
    pub kappa_column: usize,
    /// First column of the cone block.
    pub block_column: usize,
}

/// Line dissipation term at one jump point.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpTerm {
    pub edge: usize,
    pub triangles: [Option<usize>; 2],
    pub position: Point,
    pub weight: f64,
    pub rule: JumpRule,
    pub row: Vec<(usize, f64)>,
    pub s_column: usize,
    pub block_column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssembledProblem {
    pub program: ConicProgram,
    pub criterion: YieldCriterion,
    pub reduction: DirichletReduction,
    /// Load vector over free columns.
    pub load: Vec<f64>,
    pub curvature: Vec<CurvatureTerm>,
    pub jumps: Vec<JumpTerm>,
    pub size: ProblemSize,
    pub metadata: Metadata,
}

fn append_block(
    block: &ConeBlock,
    first_col: usize,
    slot_cols: &[usize],
    row: &mut usize,
    trip: &mut Vec<(usize, usize, f64)>,
    c: &mut [f64],
    cones: &mut Vec<Cone>,
) {
    for (j, &o) in block.objective.iter().enumerate() {
        c[first_col + j] = o;
    }
    for r in &block.rows {
        for &(j, v) in &r.vars {
            trip.push((*row, first_col + j, v));
        }
        for &(k, v) in &r.slots {
            trip.push((*row, slot_cols[k], -v));
        }
        *row += 1;
    }
    cones.extend(block.cones.iter().copied());
}

/// Builds the conic program of the discrete kinematic problem on `space`.
pub fn assemble(
    space: &ElementSpace,
    criterion: &YieldCriterion,
    load: &LoadSpec,
    bcs: &BoundaryConditions,
) -> Result<AssembledProblem, AssembleError> {
    let mesh = space.mesh;
    let kinds = bcs.edge_kinds(mesh)?;
    let reduction = dirichlet_reduction(space, &kinds)?;
    let curv = build_curvature_operator(space);
    let jump = build_edge_jump_operator(space, &kinds);
    let nf = reduction.num_free;

    let ell_global = assemble_load(space, load)?;
    let ell_row: Vec<(usize, f64)> = ell_global.iter().copied().enumerate().collect();
    let mut load_free = vec![0.0; nf];
    for (j, v) in reduction.reduce_row(&ell_row) {
        load_free[j] = v;
    }
    if load_free.iter().all(|&v| v == 0.0) {
        return Err(AssembleError::InfeasibleBcs);
    }

    // Blocks are built first so that strength errors surface before any
    // allocation proportional to the program size.
    let bulk_blocks: Vec<ConeBlock> = curv
        .points
        .iter()
        .map(|p| emit_cone_block(criterion, p.position))
        .collect::<Result<_, _>>()?;
    let edge_blocks: Vec<ConeBlock> = jump
        .points
        .iter()
        .map(|p| emit_edge_block(criterion, p.position))
        .collect::<Result<_, _>>()?;

    let nq = curv.points.len();
    let ns = jump.points.len();
    let kappa0 = nf;
    let s0 = kappa0 + 3 * nq;
    let mut col = s0 + ns;
    let mut curvature = Vec::with_capacity(nq);
    for (q, p) in curv.points.iter().enumerate() {
        let l2g = &space.dofs.local_to_global[p.triangle];
        let n = l2g.len();
        let rows = [0, 1, 2].map(|r| {
            let global: Vec<(usize, f64)> = (0..n).map(|k| (l2g[k], p.matrix[r * n + k])).collect();
            reduction.reduce_row(&global)
        });
        curvature.push(CurvatureTerm {
            triangle: p.triangle,
            position: p.position,
            weight: p.weight,
            rows,
            kappa_column: kappa0 + 3 * q,
            block_column: col,
        });
        col += bulk_blocks[q].num_vars();
    }
    let mut jumps = Vec::with_capacity(ns);
    for (i, p) in jump.points.iter().enumerate() {
        jumps.push(JumpTerm {
            edge: p.edge,
            triangles: mesh.edges[p.edge].triangles,
            position: p.position,
            weight: p.weight,
            rule: p.rule,
            row: reduction.reduce_row(&p.row),
            s_column: s0 + i,
            block_column: col,
        });
        col += edge_blocks[i].num_vars();
    }
    let ncols = col;

    let mut trip = Vec::new();
    let mut c = vec![0.0; ncols];
    let mut cones = vec![Cone::Free(s0 + ns)];
    let mut row = 0;
    for term in &curvature {
        for (r, coeffs) in term.rows.iter().enumerate() {
            trip.push((row, term.kappa_column + r, 1.0));
            trip.extend(coeffs.iter().map(|&(j, v)| (row, j, -term.weight * v)));
            row += 1;
        }
    }
    for term in &jumps {
        trip.push((row, term.s_column, 1.0));
        trip.extend(term.row.iter().map(|&(j, v)| (row, j, -term.weight * v)));
        row += 1;
    }
    for (term, block) in curvature.iter().zip(&bulk_blocks) {
        let k = term.kappa_column;
        append_block(
            block,
            term.block_column,
            &[k, k + 1, k + 2],
            &mut row,
            &mut trip,
            &mut c,
            &mut cones,
        );
    }
    for (term, block) in jumps.iter().zip(&edge_blocks) {
        append_block(
            block,
            term.block_column,
            &[term.s_column],
            &mut row,
            &mut trip,
            &mut c,
            &mut cones,
        );
    }
    // `ℓᵀu = 1` scaled to unit largest coefficient.
    let ell_max = load_free.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    trip.extend(
        load_free
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(j, &v)| (row, j, v / ell_max)),
    );
    row += 1;
    let mut b = vec![0.0; row];
    b[row - 1] = 1.0 / ell_max;

    let a = CscMatrix::from_triplets(row, ncols, &trip);
    let nnz = a.nnz();
    let num_cones = cones.len();
    let program = ConicProgram::new(a, b, c, cones).expect("assembled program is well formed");

    let jump_rules = jump.rules();
    let rigor = if jump_rules.iter().all(|r| r.overestimates()) && criterion.has_constant_strength() {
        Rigor::Strict
    } else {
        Rigor::QuadratureLimited
    };
    Ok(AssembledProblem {
        program,
        criterion: criterion.clone(),
        size: ProblemSize {
            rows: row,
            cols: ncols,
            cones: num_cones,
            nnz,
            triangles: mesh.num_triangles(),
            edges: mesh.num_edges(),
            total_dofs: space.num_dofs(),
            free_dofs: nf,
            curvature_points: nq,
            jump_points: ns,
        },
        reduction,
        load: load_free,
        curvature,
        jumps,
        metadata: Metadata {
            element: space.family,
            criterion: criterion.name(),
            curvature_rule: match space.family {
                ElementFamily::LagrangeP2 => "centroid",
                ElementFamily::HermiteP3 => "vertices",
            },
            jump_rules,
            rigor,
        },
    })
}

fn dot(row: &[(usize, f64)], u: &[f64]) -> f64 {
    row.iter().map(|&(j, v)| v * u[j]).sum()
}

impl AssembledProblem {
    /// `⟨ℓ, u⟩` for a vector over free columns.
    pub fn external_work(&self, u_free: &[f64]) -> f64 {
        self.load.iter().zip(u_free).map(|(a, b)| a * b).sum()
    }

    pub fn curvature_at(&self, q: usize, u_free: &[f64]) -> Sym2 {
        let rows = &self.curvature[q].rows;
        [dot(&rows[0], u_free), dot(&rows[1], u_free), dot(&rows[2], u_free)]
    }

    pub fn jump_at(&self, p: usize, u_free: &[f64]) -> f64 {
        dot(&self.jumps[p].row, u_free)
    }

    /// Discrete dissipation of a displacement over free columns, computed
    /// directly from the support function.
    /// Primal point determined by the mechanism in `x`: the dofs scaled to
    /// unit external work, link columns from their definitions and every
    /// block at its minimal value.
    pub fn recovered_point(&self, x: &[f64]) -> Vec<f64> {
        let nf = self.reduction.num_free;
        let mut out = vec![0.0; self.size.cols];
        out[..nf].copy_from_slice(&x[..nf]);
        let work = self.external_work(&out[..nf]);
        if work.is_finite() && work > 0.0 {
            out[..nf].iter_mut().for_each(|v| *v /= work);
        }
        let (u, rest) = out.split_at_mut(nf);
        let u: &[f64] = u;
        for (q, term) in self.curvature.iter().enumerate() {
            let k = self.curvature_at(q, u).map(|v| term.weight * v);
            let strength = self
                .criterion
                .local(term.position)
                .expect("strength validated at assembly");
            rest[term.kappa_column - nf..term.kappa_column - nf + 3].copy_from_slice(&k);
            let v = cone_block_point(strength, k);
            rest[term.block_column - nf..term.block_column - nf + v.len()].copy_from_slice(&v);
        }
        for (p, term) in self.jumps.iter().enumerate() {
            let s = term.weight * self.jump_at(p, u);
            rest[term.s_column - nf] = s;
            let v = edge_block_point(s);
            rest[term.block_column - nf..term.block_column - nf + v.len()].copy_from_slice(&v);
        }
        out
    }

    pub fn dissipation(&self, u_free: &[f64]) -> Dissipation {
        let points: Vec<f64> = (0..self.curvature.len())
            .map(|q| {
                pi_eval(
                    &self.criterion,
                    self.curvature[q].position,
                    self.curvature_at(q, u_free),
                )
            })
            .collect();
        let jumps: Vec<f64> = (0..self.jumps.len())
            .map(|p| pi_edge(&self.criterion, self.jumps[p].position, self.jump_at(p, u_free)))
            .collect();
        let bulk = self
            .curvature
            .iter()
            .zip(&points)
            .map(|(t, v)| t.weight * v)
            .sum::<f64>();
        let line = self.jumps.iter().zip(&jumps).map(|(t, v)| t.weight * v).sum::<f64>();
        Dissipation {
            points,
            jumps,
            bulk,
            line,
        }
    }

    /// Discrete upper bound `J_h(u) / ⟨ℓ, u⟩` of a mechanism with positive
    /// external work.
    pub fn upper_bound_of(&self, u_free: &[f64]) -> Option<f64> {
        let w = self.external_work(u_free);
        (w > 0.0).then(|| self.dissipation(u_free).total() / w)
    }

    pub fn dump_string(&self) -> String {
        dump::write_dump_string(&self.program)
    }

    pub fn solve(&self, settings: &Settings) -> Result<LimitAnalysisResult, AssembleError> {
        let solution = conic::solve(&self.program, settings);
        recover_result(self, &solution)
    }
}

/// Dissipation densities at the quadrature points of a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Dissipation {
    /// `π(x_q, κ_q)` at every curvature point.
    pub points: Vec<f64>,
    /// `π(x_p, s_p ν⊗ν)` at every jump point.
    pub jumps: Vec<f64>,
    pub bulk: f64,
    pub line: f64,
}

impl Dissipation {
    pub fn total(&self) -> f64 {
        self.bulk + self.line
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitAnalysisResult {
    /// Optimal multiplier, equal to the conic objective at `x`.
    pub lambda: f64,
    /// Global dof vector, zero on Dirichlet dofs.
    pub u: Vec<f64>,
    pub u_free: Vec<f64>,
    /// Support function at every curvature point.
    pub point_dissipation: Vec<f64>,
    /// Bulk dissipation per unit area on each triangle.
    pub triangle_dissipation: Vec<f64>,
    /// Bulk dissipation plus half the line dissipation of each adjacent
    /// interior edge (all of it for boundary edges), per unit area.
    pub cell_dissipation: Vec<f64>,
    /// Line dissipation integrated over each mesh edge.
    pub edge_dissipation: Vec<f64>,
    /// Objective of the solver's own iterate; differs from `lambda` by the
    /// solver's residuals.
    pub solver_objective: f64,
    /// Recomputed discrete dissipation `J_h(u)`.
    pub recomputed: f64,
    /// `|J_h(u) − λ| / λ`.
    pub consistency_gap: f64,
    /// `|ℓᵀu − 1|`.
    pub normalization_residual: f64,
    pub status: Status,
    pub reduced_accuracy: bool,
    pub residuals: Residuals,
    pub iterations: usize,
    pub rigor: Rigor,
}

/// Extracts the mechanism and its dissipation from an optimal solution.
pub fn recover_result(
    problem: &AssembledProblem,
    solution: &ConicSolution,
) -> Result<LimitAnalysisResult, AssembleError> {
    if solution.status != Status::Optimal {
        return Err(AssembleError::NotOptimal {
            status: solution.status,
            residuals: solution.residuals,
            iterations: solution.iterations,
        });
    }
    if solution.x.len() != problem.size.cols {
        return Err(AssembleError::DimensionMismatch {
            expected: problem.size.cols,
            found: solution.x.len(),
        });
    }
    let x = problem.recovered_point(&solution.x);
    let nf = problem.reduction.num_free;
    let u_free = x[..nf].to_vec();
    let u = problem.reduction.expand_vector(&u_free);
    let lambda = problem.program.objective(&x);
    let d = problem.dissipation(&u_free);

    let mut triangle_dissipation = vec![0.0; problem.size.triangles];
    let mut triangle_area = vec![0.0; problem.size.triangles];
    for (term, v) in problem.curvature.iter().zip(&d.points) {
        triangle_dissipation[term.triangle] += term.weight * v;
        triangle_area[term.triangle] += term.weight;
    }
    let mut cell_dissipation = triangle_dissipation.clone();
    for (v, a) in triangle_dissipation.iter_mut().zip(&triangle_area) {
        *v /= a;
    }
    let mut edge_dissipation = vec![0.0; problem.size.edges];
    for (term, v) in problem.jumps.iter().zip(&d.jumps) {
        let e = term.weight * v;
        edge_dissipation[term.edge] += e;
        match term.triangles {
            [Some(a), Some(b)] => {
                cell_dissipation[a] += 0.5 * e;
                cell_dissipation[b] += 0.5 * e;
            }
            [Some(a), None] | [None, Some(a)] => cell_dissipation[a] += e,
            [None, None] => {}
        }
    }
    for (v, a) in cell_dissipation.iter_mut().zip(&triangle_area) {
        *v /= a;
    }

    let recomputed = d.total();
    Ok(LimitAnalysisResult {
        lambda,
        solver_objective: solution.primal_objective,
        normalization_residual: (problem.external_work(&u_free) - 1.0).abs(),
        consistency_gap: (recomputed - lambda).abs() / lambda.abs().max(f64::MIN_POSITIVE),
        recomputed,
        u,
        u_free,
        point_dissipation: d.points,
        triangle_dissipation,
        cell_dissipation,
        edge_dissipation,
        status: solution.status,
        reduced_accuracy: solution.reduced_accuracy,
        residuals: solution.residuals,
        iterations: solution.iterations,
        rigor: problem.metadata.rigor,
    })
}

/// Convenience wrapper: space, assembly, solve and recovery.
pub fn solve_limit_analysis(
    mesh: &Mesh,
    family: ElementFamily,
    criterion: &YieldCriterion,
    load: &LoadSpec,
    bcs: &BoundaryConditions,
    settings: &Settings,
) -> Result<(AssembledProblem, LimitAnalysisResult), AssembleError> {
    let space = ElementSpace::new(family, mesh);
    let problem = assemble(&space, criterion, load, bcs)?;
    let result = problem.solve(settings)?;
    Ok((problem, result))
}

#[cfg(test)]
mod tests;
