//! End-to-end runs through files: mesh import, conic dumps and solves.

use std::fs;

use approx::assert_relative_eq;
use tempfile::TempDir;

use platelimit::benchmarks::{johansen, quarter_square, Support};
use platelimit::conic::{read_dump, solve, write_dump, Status};
use platelimit::mesh::{import_mesh, MeshFormat};
use platelimit::{
    assemble, solve_limit_analysis, BcKind, BoundaryConditions, CellPattern, ElementFamily, ElementSpace, LoadSpec,
    Settings,
};

const UNIT_SQUARE_MSH: &str = "\
$MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
2
1 1 \"support\"
2 2 \"plate\"
$EndPhysicalNames
$Nodes
5
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
5 0.5 0.5 0
$EndNodes
$Elements
8
1 1 2 1 1 1 2
2 1 2 1 1 2 3
3 1 2 1 1 3 4
4 1 2 1 1 4 1
5 2 2 2 1 1 2 5
6 2 2 2 1 2 3 5
7 2 2 2 1 3 4 5
8 2 2 2 1 4 1 5
$EndElements
";

#[test]
fn imported_mesh_matches_the_generated_one() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("square.msh");
    fs::write(&path, UNIT_SQUARE_MSH).unwrap();
    let imported = import_mesh(&path, MeshFormat::Msh2Ascii).unwrap();
    assert_eq!(imported.triangles.len(), 4);
    assert_eq!(imported.boundary_tags.len(), 4);
    assert!(imported.boundary_tags.values().all(|t| t == "support"));

    let generated = platelimit::generate_rect_mesh(1.0, 1.0, 1, 1, CellPattern::Crossed).unwrap();
    let run = |mesh: &platelimit::Mesh, region: &str| {
        let mesh = mesh.refine_uniform().refine_uniform();
        let bcs = BoundaryConditions::new([(region, BcKind::Dirichlet)]);
        solve_limit_analysis(
            &mesh,
            ElementFamily::LagrangeP2,
            &johansen(1.0),
            &LoadSpec::UniformPressure(1.0),
            &bcs,
            &Settings::default(),
        )
        .unwrap()
        .1
        .lambda
    };
    let generated_bcs: Vec<(String, BcKind)> = ["left", "right", "bottom", "top"]
        .iter()
        .map(|s| (s.to_string(), BcKind::Dirichlet))
        .collect();
    let (_, reference) = solve_limit_analysis(
        &generated.refine_uniform().refine_uniform(),
        ElementFamily::LagrangeP2,
        &johansen(1.0),
        &LoadSpec::UniformPressure(1.0),
        &BoundaryConditions::new(generated_bcs),
        &Settings::default(),
    )
    .unwrap();
    assert_relative_eq!(run(&imported, "support"), reference.lambda, max_relative = 1e-7);
    // The crossed unit square carries the exact yield-line mechanism.
    assert_relative_eq!(reference.lambda, 24.0, max_relative = 1e-7);
}

#[test]
fn dumped_programs_solve_identically() {
    let dir = TempDir::new().unwrap();
    let (mesh, bcs) = quarter_square(Support::Clamped, 3, CellPattern::Diag);
    let space = ElementSpace::new(ElementFamily::HermiteP3, &mesh);
    let problem = assemble(&space, &johansen(1.0), &LoadSpec::UniformPressure(1.0), &bcs).unwrap();
    let path = dir.path().join("program.txt");
    write_dump(&problem.program, &path).unwrap();
    let reread = read_dump(&path).unwrap();
    assert_eq!(reread, problem.program);

    let settings = Settings::default();
    let (a, b) = (solve(&problem.program, &settings), solve(&reread, &settings));
    assert_eq!(a.status, Status::Optimal);
    assert_eq!(a.x, b.x);
    let result = problem.solve(&settings).unwrap();
    assert_relative_eq!(result.solver_objective, a.primal_objective, max_relative = 1e-12);
    assert!(result.lambda >= 42.851 * (1.0 - 1e-7));
}

#[test]
fn results_are_upper_bounds_that_tighten_under_refinement() {
    let mut previous = f64::INFINITY;
    for n in [1, 2, 4] {
        let (mesh, bcs) = quarter_square(Support::Clamped, n, CellPattern::Crossed);
        let (_, r) = solve_limit_analysis(
            &mesh,
            ElementFamily::HermiteP3,
            &johansen(1.0),
            &LoadSpec::UniformPressure(1.0),
            &bcs,
            &Settings::default(),
        )
        .unwrap();
        assert!(r.lambda >= Support::Clamped.reference_lambda() * (1.0 - 1e-7));
        assert!(
            r.lambda <= previous * (1.0 + 1e-7),
            "n = {n}: {} after {previous}",
            r.lambda
        );
        assert!(r.consistency_gap <= 1e-6);
        previous = r.lambda;
    }
}

#[test]
fn documented_dump_example_solves() {
    let text = "CONIC 1\nDIMS 2 3 2\nCONES 1\nQ 3\nC 1.0 0.0 0.0\nB 3.0 4.0\nA\n0 1 1.0\n1 2 1.0\nEND\n";
    let program = platelimit::conic::dump::parse_dump(text).unwrap();
    assert_eq!(platelimit::conic::dump::write_dump_string(&program), text);
    let sol = solve(&program, &Settings::default());
    assert_eq!(sol.status, Status::Optimal);
    assert_relative_eq!(sol.primal_objective, 5.0, max_relative = 1e-8);
}
