use std::f64::consts::PI;

use super::*;
use crate::fem::{Analytic, BcKind};
use crate::mesh::{generate_rect_mesh, CellPattern};
use crate::yield_criteria::StrengthField;

fn johansen(m: f64) -> YieldCriterion {
    YieldCriterion::Johansen {
        positive: StrengthField::Constant(m),
        negative: StrengthField::Constant(m),
    }
}

fn quarter_bcs(outer: BcKind) -> BoundaryConditions {
    BoundaryConditions::new([
        ("left", outer),
        ("bottom", outer),
        ("right", BcKind::Symmetry),
        ("top", BcKind::Symmetry),
    ])
}

fn all_sides(kind: BcKind) -> BoundaryConditions {
    BoundaryConditions::new(["left", "right", "bottom", "top"].map(|s| (s, kind)))
}

fn settings() -> Settings {
    Settings::default()
}

#[test]
fn load_vector_integrates_the_load() {
    let mesh = generate_rect_mesh(1.0, 1.0, 3, 3, CellPattern::Crossed).unwrap();
    for family in [ElementFamily::LagrangeP2, ElementFamily::HermiteP3] {
        let space = ElementSpace::new(family, &mesh);
        let ell = assemble_load(&space, &LoadSpec::UniformPressure(1.0)).unwrap();
        let one = space.interpolate(&Analytic {
            value: |_p: Point| 1.0,
            gradient: |_p: Point| [0.0; 2],
            hessian: |_p: Point| [0.0; 3],
        });
        let x = space.interpolate(&Analytic {
            value: |p: Point| p[0],
            gradient: |_p: Point| [1.0, 0.0],
            hessian: |_p: Point| [0.0; 3],
        });
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        assert!((dot(&ell, &one) - 1.0).abs() < 1e-13);
        assert!((dot(&ell, &x) - 0.5).abs() < 1e-13);
    }
}

#[test]
fn load_vector_is_family_independent_on_quadratics() {
    let mesh = generate_rect_mesh(1.0, 1.0, 2, 3, CellPattern::Diag).unwrap();
    let load = LoadSpec::Density(Expr::parse("1 + x1 - 2*x2").unwrap());
    let q = Analytic {
        value: |p: Point| p[0] * p[0] - p[0] * p[1] + 0.5 * p[1],
        gradient: |p: Point| [2.0 * p[0] - p[1], 0.5 - p[0]],
        hessian: |_p: Point| [2.0, 0.0, -1.0],
    };
    let mut works = Vec::new();
    for family in [ElementFamily::LagrangeP2, ElementFamily::HermiteP3] {
        let space = ElementSpace::new(family, &mesh);
        let ell = assemble_load(&space, &load).unwrap();
        let d = space.interpolate(&q);
        works.push(ell.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>());
    }
    // ∫ (1 + x − 2y)(x² − xy + y/2) over the unit square.
    let exact = 5.0 / 24.0;
    assert!((works[0] - exact).abs() < 1e-13, "{} {exact}", works[0]);
    assert!((works[0] - works[1]).abs() < 1e-13);
}

#[test]
fn bad_load_density_is_reported() {
    let mesh = generate_rect_mesh(1.0, 1.0, 1, 1, CellPattern::Diag).unwrap();
    let space = ElementSpace::new(ElementFamily::LagrangeP2, &mesh);
    let load = LoadSpec::Density(Expr::parse("1 / (x1 - x1)").unwrap());
    assert!(matches!(
        assemble_load(&space, &load),
        Err(AssembleError::LoadEvaluation { .. })
    ));
}

#[test]
fn johansen_p2_size_formula() {
    // Crossed 2 × 2 quarter of the unit square: 13 vertices, 28 edges,
    // 16 triangles; supports on left/bottom fix 5 vertex and 4 midpoint dofs.
    let mesh = generate_rect_mesh(0.5, 0.5, 2, 2, CellPattern::Crossed).unwrap();
    let space = ElementSpace::new(ElementFamily::LagrangeP2, &mesh);
    let p = assemble(
        &space,
        &johansen(1.0),
        &LoadSpec::UniformPressure(1.0),
        &quarter_bcs(BcKind::Dirichlet),
    )
    .unwrap();
    let (q, nf) = (16, 41 - 9);
    // 20 interior edges plus 4 symmetry edges, two trapezoid points each.
    let s = 2 * (20 + 4);
    assert_eq!(p.size.free_dofs, nf);
    assert_eq!(p.size.curvature_points, q);
    assert_eq!(p.size.jump_points, s);
    assert_eq!(p.size.rows, 6 * q + 2 * s + 1);
    assert_eq!(p.size.cols, nf + 9 * q + 3 * s);
    assert_eq!(p.size.cones, 1 + 2 * q + s);
    assert_eq!(p.program.num_rows(), p.size.rows);
    assert_eq!(p.metadata.rigor, Rigor::Strict);
}

#[test]
fn normalization_row_is_last_and_unique() {
    let mesh = generate_rect_mesh(1.0, 1.0, 2, 2, CellPattern::Diag).unwrap();
    let space = ElementSpace::new(ElementFamily::HermiteP3, &mesh);
    let p = assemble(
        &space,
        &johansen(1.0),
        &LoadSpec::UniformPressure(1.0),
        &all_sides(BcKind::Dirichlet),
    )
    .unwrap();
    let ones: Vec<usize> = p
        .program
        .b
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, _)| i)
        .collect();
    assert_eq!(ones, vec![p.size.rows - 1]);
    let ell_max = p.load.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert_eq!(p.program.b[p.size.rows - 1], 1.0 / ell_max);
    assert_eq!(p.metadata.rigor, Rigor::Strict);
    let clamped = assemble(
        &space,
        &johansen(1.0),
        &LoadSpec::UniformPressure(1.0),
        &all_sides(BcKind::Clamped),
    )
    .unwrap();
    assert_eq!(clamped.metadata.rigor, Rigor::QuadratureLimited);
}

#[test]
fn assembly_errors() {
    let mesh = generate_rect_mesh(1.0, 1.0, 2, 2, CellPattern::Diag).unwrap();
    let space = ElementSpace::new(ElementFamily::LagrangeP2, &mesh);
    let load = LoadSpec::UniformPressure(1.0);
    assert!(matches!(
        assemble(&space, &johansen(1.0), &load, &all_sides(BcKind::Free)),
        Err(AssembleError::Fem(FemError::DegenerateDirichlet(_)))
    ));
    assert!(matches!(
        assemble(
            &space,
            &johansen(1.0),
            &LoadSpec::UniformPressure(0.0),
            &all_sides(BcKind::Dirichlet)
        ),
        Err(AssembleError::InfeasibleBcs)
    ));
    assert!(matches!(
        assemble(&space, &johansen(-1.0), &load, &all_sides(BcKind::Dirichlet)),
        Err(AssembleError::Yield(_))
    ));
}

fn solve_square(
    n: usize,
    pattern: CellPattern,
    family: ElementFamily,
    criterion: &YieldCriterion,
    load: f64,
) -> (AssembledProblem, LimitAnalysisResult) {
    let mesh = generate_rect_mesh(0.5, 0.5, n, n, pattern).unwrap();
    solve_limit_analysis(
        &mesh,
        family,
        criterion,
        &LoadSpec::UniformPressure(load),
        &quarter_bcs(BcKind::Dirichlet),
        &settings(),
    )
    .unwrap()
}

#[test]
fn result_is_self_consistent() {
    for family in [ElementFamily::LagrangeP2, ElementFamily::HermiteP3] {
        let (p, r) = solve_square(3, CellPattern::Crossed, family, &johansen(1.0), 1.0);
        assert_eq!(r.status, Status::Optimal);
        assert!(r.lambda > 24.0 * (1.0 - 1e-6), "{family}: {}", r.lambda);
        assert!(r.normalization_residual <= 1e-8);
        // Symmetry edges make the Hermite bound quadrature-limited, where
        // the recomputed value still matches the solver's own quadrature.
        assert!(r.consistency_gap <= 1e-6, "{family}: {}", r.consistency_gap);
        for g in 0..r.u.len() {
            if p.reduction.is_fixed(g) {
                assert_eq!(r.u[g], 0.0);
            }
        }
        let total: f64 = r
            .cell_dissipation
            .iter()
            .enumerate()
            .map(|(t, d)| d * cell_area(&p, t))
            .sum();
        assert!((total - r.recomputed).abs() <= 1e-9 * r.recomputed);
    }
}

fn cell_area(p: &AssembledProblem, t: usize) -> f64 {
    p.curvature.iter().filter(|c| c.triangle == t).map(|c| c.weight).sum()
}

#[test]
fn doubling_the_load_halves_lambda() {
    let (_, a) = solve_square(2, CellPattern::Crossed, ElementFamily::LagrangeP2, &johansen(1.0), 1.0);
    let (_, b) = solve_square(2, CellPattern::Crossed, ElementFamily::LagrangeP2, &johansen(1.0), 2.0);
    assert!((a.lambda - 2.0 * b.lambda).abs() <= 1e-6 * a.lambda);
}

#[test]
fn strength_scaling() {
    let vm = YieldCriterion::VonMises(StrengthField::Constant(1.0));
    let (_, a) = solve_square(2, CellPattern::Diag, ElementFamily::HermiteP3, &vm, 1.0);
    let (_, b) = solve_square(2, CellPattern::Diag, ElementFamily::HermiteP3, &vm.scaled(3.5), 1.0);
    assert!((3.5 * a.lambda - b.lambda).abs() <= 1e-6 * b.lambda);
}

#[test]
fn analytic_mechanism_bounds_the_optimum() {
    // Full simply supported square with the smooth mechanism sin πx sin πy.
    let mesh = generate_rect_mesh(1.0, 1.0, 4, 4, CellPattern::Crossed).unwrap();
    let crit = johansen(1.0);
    let (p, r) = solve_limit_analysis(
        &mesh,
        ElementFamily::LagrangeP2,
        &crit,
        &LoadSpec::UniformPressure(1.0),
        &all_sides(BcKind::Dirichlet),
        &settings(),
    )
    .unwrap();
    let space = ElementSpace::new(ElementFamily::LagrangeP2, &mesh);
    let full = space.interpolate(&Analytic {
        value: |p: Point| (PI * p[0]).sin() * (PI * p[1]).sin(),
        gradient: |_p: Point| [0.0; 2],
        hessian: |_p: Point| [0.0; 3],
    });
    // Every non-fixed P2 dof is its own free column.
    let mut free = vec![0.0; p.reduction.num_free];
    for (g, terms) in p.reduction.expand.iter().enumerate() {
        if let [(j, c)] = terms.as_slice() {
            free[*j] = full[g] / c;
        }
    }
    let bound = p.upper_bound_of(&free).unwrap();
    assert!(bound >= r.lambda - 1e-6, "{bound} < {}", r.lambda);
}

#[test]
fn nested_refinement_does_not_increase_lambda() {
    let coarse = generate_rect_mesh(0.5, 0.5, 2, 2, CellPattern::Diag).unwrap();
    let fine = coarse.refine_uniform();
    let crit = johansen(1.0);
    let load = LoadSpec::UniformPressure(1.0);
    let bcs = quarter_bcs(BcKind::Clamped);
    let (_, a) = solve_limit_analysis(&coarse, ElementFamily::LagrangeP2, &crit, &load, &bcs, &settings()).unwrap();
    let (_, b) = solve_limit_analysis(&fine, ElementFamily::LagrangeP2, &crit, &load, &bcs, &settings()).unwrap();
    assert!(b.lambda <= a.lambda + 1e-6, "{} > {}", b.lambda, a.lambda);
}

#[test]
fn rigid_motion_invariance() {
    let mesh = generate_rect_mesh(1.0, 0.8, 3, 2, CellPattern::Crossed).unwrap();
    let (s, c) = 0.7f64.sin_cos();
    let moved = mesh
        .transformed(|p| [3.0 + c * p[0] - s * p[1], -1.0 + s * p[0] + c * p[1]])
        .unwrap();
    let crit = YieldCriterion::Tresca(StrengthField::Constant(1.0));
    let bcs = BoundaryConditions::new([
        ("left", BcKind::Dirichlet),
        ("bottom", BcKind::Dirichlet),
        ("right", BcKind::Clamped),
        ("top", BcKind::Free),
    ]);
    let load = LoadSpec::UniformPressure(1.0);
    for family in [ElementFamily::LagrangeP2, ElementFamily::HermiteP3] {
        let (_, a) = solve_limit_analysis(&mesh, family, &crit, &load, &bcs, &settings()).unwrap();
        let (_, b) = solve_limit_analysis(&moved, family, &crit, &load, &bcs, &settings()).unwrap();
        assert!(
            (a.lambda - b.lambda).abs() <= 1e-6 * a.lambda,
            "{family}: {} {}",
            a.lambda,
            b.lambda
        );
    }
}

#[test]
fn not_optimal_is_propagated() {
    let (p, _) = solve_square(1, CellPattern::Diag, ElementFamily::LagrangeP2, &johansen(1.0), 1.0);
    let sol = conic::solve(
        &p.program,
        &Settings {
            max_iter: 2,
            ..settings()
        },
    );
    assert!(matches!(
        recover_result(&p, &sol),
        Err(AssembleError::NotOptimal {
            status: Status::MaxIter,
            ..
        })
    ));
}

#[test]
fn dump_round_trips() {
    let (p, _) = solve_square(1, CellPattern::Crossed, ElementFamily::HermiteP3, &johansen(1.0), 1.0);
    assert_eq!(dump::parse_dump(&p.dump_string()).unwrap(), p.program);
}
