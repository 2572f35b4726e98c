use std::f64::consts::PI;

use super::*;
use crate::mesh::{generate_rect_mesh, CellPattern};

const FAMILIES: [ElementFamily; 2] = [ElementFamily::LagrangeP2, ElementFamily::HermiteP3];

/// `a x² + b xy + c y² + d x³ + e x²y + f xy² + g y³ + linear terms`.
#[derive(Clone, Copy)]
struct Poly([f64; 10]);

impl SmoothFunction for Poly {
    fn value(&self, p: Point) -> f64 {
        let [c0, c1, c2, a, b, c, d, e, f, g] = self.0;
        let (x, y) = (p[0], p[1]);
        c0 + c1 * x
            + c2 * y
            + a * x * x
            + b * x * y
            + c * y * y
            + d * x.powi(3)
            + e * x * x * y
            + f * x * y * y
            + g * y.powi(3)
    }
    fn gradient(&self, p: Point) -> [f64; 2] {
        let [_, c1, c2, a, b, c, d, e, f, g] = self.0;
        let (x, y) = (p[0], p[1]);
        [
            c1 + 2.0 * a * x + b * y + 3.0 * d * x * x + 2.0 * e * x * y + f * y * y,
            c2 + b * x + 2.0 * c * y + e * x * x + 2.0 * f * x * y + 3.0 * g * y * y,
        ]
    }
    fn hessian(&self, p: Point) -> Sym2 {
        let [_, _, _, a, b, c, d, e, f, g] = self.0;
        let (x, y) = (p[0], p[1]);
        [
            2.0 * a + 6.0 * d * x + 2.0 * e * y,
            2.0 * c + 2.0 * f * x + 6.0 * g * y,
            b + 2.0 * e * x + 2.0 * f * y,
        ]
    }
}

fn quadratic() -> Poly {
    Poly([0.3, -1.0, 0.5, 1.2, -0.7, 0.4, 0.0, 0.0, 0.0, 0.0])
}

fn cubic() -> Poly {
    Poly([0.1, 0.2, -0.3, 0.5, 0.25, -1.0, 0.8, -0.6, 0.45, 1.1])
}

fn sinsin() -> impl SmoothFunction {
    Analytic {
        value: |p: Point| (PI * p[0]).sin() * (PI * p[1]).sin(),
        gradient: |p: Point| {
            [
                PI * (PI * p[0]).cos() * (PI * p[1]).sin(),
                PI * (PI * p[0]).sin() * (PI * p[1]).cos(),
            ]
        },
        hessian: |p: Point| {
            let s = (PI * p[0]).sin() * (PI * p[1]).sin();
            [
                -PI * PI * s,
                -PI * PI * s,
                PI * PI * (PI * p[0]).cos() * (PI * p[1]).cos(),
            ]
        },
    }
}

fn square(n: usize, pattern: CellPattern) -> Mesh {
    generate_rect_mesh(1.0, 1.0, n, n, pattern).unwrap()
}

fn two_triangles() -> Mesh {
    square(1, CellPattern::Diag)
}

/// A skewed mesh with no symmetry, for stronger checks.
fn skewed() -> Mesh {
    square(3, CellPattern::Crossed)
        .transformed(|p| [p[0] + 0.2 * p[1] + 0.05 * p[0] * p[1], 0.9 * p[1] + 0.1 * p[0] * p[0]])
        .unwrap()
}

#[test]
fn kronecker_duality() {
    for family in FAMILIES {
        let mesh = skewed();
        let space = ElementSpace::new(family, &mesh);
        for t in [0, 5, mesh.num_triangles() - 1] {
            let c = mesh.corners(t);
            let b = &space.bases[t];
            let mid = |i: usize, j: usize| [0.5 * (c[i][0] + c[j][0]), 0.5 * (c[i][1] + c[j][1])];
            let n = family.local_dof_count();
            for k in 0..n {
                let mut nodal = Vec::new();
                match family {
                    ElementFamily::LagrangeP2 => {
                        for p in [c[0], c[1], c[2], mid(0, 1), mid(1, 2), mid(2, 0)] {
                            nodal.push(b.eval(p).values[k]);
                        }
                    }
                    ElementFamily::HermiteP3 => {
                        for p in [c[0], c[1], c[2], mesh.centroid(t)] {
                            nodal.push(b.eval(p).values[k]);
                        }
                        for p in c {
                            let g = b.eval(p).gradients[k];
                            nodal.extend(g);
                        }
                    }
                }
                for (i, v) in nodal.iter().enumerate() {
                    let expect = if i == k { 1.0 } else { 0.0 };
                    assert!(
                        (v - expect).abs() < 1e-12,
                        "{family} t{t} shape {k} functional {i}: {v}"
                    );
                }
            }
        }
    }
}

#[test]
fn reference_shape_values() {
    let p2 = shape_eval(ElementFamily::LagrangeP2, [1.0, 0.0, 0.0]).unwrap();
    assert!((p2.values[0] - 1.0).abs() < 1e-14 && p2.values[1..].iter().all(|v| v.abs() < 1e-14));
    let p2 = shape_eval(ElementFamily::LagrangeP2, [0.5, 0.5, 0.0]).unwrap();
    assert!((p2.values[3] - 1.0).abs() < 1e-14);
    assert!(p2.values.iter().enumerate().all(|(k, v)| k == 3 || v.abs() < 1e-14));
    let h = shape_eval(ElementFamily::HermiteP3, [1.0 / 3.0; 3]).unwrap();
    assert!((h.values[3] - 1.0).abs() < 1e-12);
    assert!(h.values.iter().enumerate().all(|(k, v)| k == 3 || v.abs() < 1e-12));
    assert!(shape_eval(ElementFamily::LagrangeP2, [0.5, 0.6, -0.1]).is_err());
    assert!(shape_eval(ElementFamily::LagrangeP2, [0.5, 0.6, 0.0]).is_err());
}

#[test]
fn dof_counts() {
    let mesh = two_triangles();
    assert_eq!(build_dof_map(ElementFamily::LagrangeP2, &mesh).num_dofs, 9);
    assert_eq!(build_dof_map(ElementFamily::HermiteP3, &mesh).num_dofs, 14);
    let single = Mesh::from_parts(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], |_, _| None).unwrap();
    assert_eq!(build_dof_map(ElementFamily::LagrangeP2, &single).num_dofs, 6);
}

#[test]
fn shared_entities_share_dofs() {
    for family in FAMILIES {
        let mesh = skewed();
        let map = build_dof_map(family, &mesh);
        // Each global value dof sits at a single location, whichever
        // triangle refers to it.
        let space = ElementSpace::new(family, &mesh);
        for t in 0..mesh.num_triangles() {
            for (k, &g) in map.local_to_global[t].iter().enumerate() {
                let kind = map.kinds[g];
                if matches!(kind, DofKind::VertexValue | DofKind::EdgeMidpointValue) {
                    let x = map.locations[g];
                    assert!((space.bases[t].eval(x).values[k] - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn reproduces_polynomials() {
    let mesh = skewed();
    for (family, u) in [
        (ElementFamily::LagrangeP2, quadratic()),
        (ElementFamily::HermiteP3, cubic()),
    ] {
        let space = ElementSpace::new(family, &mesh);
        let d = space.interpolate(&u);
        for t in 0..mesh.num_triangles() {
            for b in [[0.2, 0.3, 0.5], [0.6, 0.1, 0.3], [0.05, 0.9, 0.05]] {
                let x = bary_point(mesh.corners(t), b);
                let e = space.eval(&d, t, x);
                assert!((e.value - u.value(x)).abs() < 1e-12);
                let g = u.gradient(x);
                assert!((e.gradient[0] - g[0]).abs() < 1e-11 && (e.gradient[1] - g[1]).abs() < 1e-11);
                let h = u.hessian(x);
                for r in 0..3 {
                    assert!((e.hessian[r] - h[r]).abs() < 1e-9);
                }
            }
        }
        let (w11, tv) = interpolation_errors(family, &mesh, &u);
        assert!(w11 <= 1e-10 && tv <= 1e-10, "{family}: {w11} {tv}");
    }
}

#[test]
fn x_squared_and_harmonic_cubic() {
    let mesh = square(2, CellPattern::Diag);
    let x2 = Poly([0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let h3 = Poly([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -3.0, 0.0]);
    for (family, u) in [(ElementFamily::LagrangeP2, x2), (ElementFamily::HermiteP3, h3)] {
        let (w11, _) = interpolation_errors(family, &mesh, &u);
        assert!(w11 < 1e-12);
    }
}

#[test]
fn interpolation_is_a_projection() {
    let mesh = skewed();
    for family in FAMILIES {
        let space = ElementSpace::new(family, &mesh);
        let d = space.interpolate(&sinsin());
        let again = space.interpolate_fe(&d);
        for (a, b) in d.iter().zip(&again) {
            assert!((a - b).abs() < 1e-11);
        }
    }
}

fn fit_slope(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let lx: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[test]
fn interpolation_rates() {
    let hs = [4usize, 8, 16];
    for family in FAMILIES {
        let (mut w, mut t) = (Vec::new(), Vec::new());
        for &n in &hs {
            let (a, b) = interpolation_errors(family, &square(n, CellPattern::Diag), &sinsin());
            w.push(a);
            t.push(b);
        }
        let h: Vec<f64> = hs.iter().map(|&n| 1.0 / n as f64).collect();
        let (sw, st) = (fit_slope(&h, &w), fit_slope(&h, &t));
        assert!(sw >= 1.9, "{family} w11 slope {sw}");
        assert!(st >= 0.9, "{family} tv slope {st}");
    }
}

#[test]
fn curvature_operator_examples() {
    let mesh = skewed();
    let half_x2 = Poly([0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let xy = Poly([0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let x3_6 = Poly([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0 / 6.0, 0.0, 0.0, 0.0]);
    let p2 = ElementSpace::new(ElementFamily::LagrangeP2, &mesh);
    let op = build_curvature_operator(&p2);
    assert_eq!(op.points.len(), mesh.num_triangles());
    let d = p2.interpolate(&half_x2);
    for q in 0..op.points.len() {
        let k = op.apply(&p2, &d, q);
        assert!((k[0] - 1.0).abs() < 1e-10 && k[1].abs() < 1e-10 && k[2].abs() < 1e-10);
    }
    let h = ElementSpace::new(ElementFamily::HermiteP3, &mesh);
    let op = build_curvature_operator(&h);
    assert_eq!(op.points.len(), 3 * mesh.num_triangles());
    let d = h.interpolate(&xy);
    for q in 0..op.points.len() {
        let k = op.apply(&h, &d, q);
        assert!(k[0].abs() < 1e-10 && k[1].abs() < 1e-10 && (k[2] - 1.0).abs() < 1e-10);
    }
    let d = h.interpolate(&x3_6);
    for (q, p) in op.points.iter().enumerate() {
        assert!((op.apply(&h, &d, q)[0] - p.position[0]).abs() < 1e-10);
    }
    // Weights sum to the triangle areas.
    for family in FAMILIES {
        let s = ElementSpace::new(family, &mesh);
        let op = build_curvature_operator(&s);
        let mut sums = vec![0.0; mesh.num_triangles()];
        for p in &op.points {
            sums[p.triangle] += p.weight;
        }
        for (t, s) in sums.iter().enumerate() {
            assert!((s - mesh.area(t)).abs() < 1e-12);
        }
    }
}

#[test]
fn curvature_of_polynomials_is_exact() {
    let mesh = skewed();
    for (family, u) in [
        (ElementFamily::LagrangeP2, quadratic()),
        (ElementFamily::HermiteP3, cubic()),
    ] {
        let s = ElementSpace::new(family, &mesh);
        let op = build_curvature_operator(&s);
        let d = s.interpolate(&u);
        for (q, p) in op.points.iter().enumerate() {
            let k = op.apply(&s, &d, q);
            let h = u.hessian(p.position);
            for r in 0..3 {
                assert!((k[r] - h[r]).abs() < 1e-10);
            }
        }
    }
}

fn all_kinds(mesh: &Mesh, kind: BcKind) -> Vec<Option<BcKind>> {
    mesh.edges.iter().map(|e| e.is_boundary().then_some(kind)).collect()
}

#[test]
fn jumps_vanish_for_c1_polynomials() {
    let mesh = skewed();
    for (family, u) in [
        (ElementFamily::LagrangeP2, quadratic()),
        (ElementFamily::HermiteP3, cubic()),
    ] {
        let s = ElementSpace::new(family, &mesh);
        let op = build_edge_jump_operator(&s, &all_kinds(&mesh, BcKind::Free));
        let d = s.interpolate(&u);
        assert_eq!(op.points.iter().filter(|p| mesh.edges[p.edge].is_boundary()).count(), 0);
        for q in 0..op.points.len() {
            assert!(op.apply(&d, q).abs() < 1e-10);
        }
    }
}

#[test]
fn hermite_jump_vanishes_at_endpoints() {
    let mesh = skewed();
    let s = ElementSpace::new(ElementFamily::HermiteP3, &mesh);
    let d = s.interpolate(&sinsin());
    for edge in mesh.edges.iter().filter(|e| !e.is_boundary()) {
        for &v in &edge.vertices {
            let x = mesh.vertices[v];
            let j = normal_jump(
                &s,
                &d,
                edge.triangles[0].unwrap(),
                edge.triangles[1].unwrap(),
                x,
                edge.normal,
            );
            assert!(j.abs() < 1e-11);
        }
    }
}

#[test]
fn hermite_aggregated_rule_is_the_integral() {
    let mesh = skewed();
    let s = ElementSpace::new(ElementFamily::HermiteP3, &mesh);
    let d = s.interpolate(&sinsin());
    let op = build_edge_jump_operator(&s, &all_kinds(&mesh, BcKind::Free));
    let g = quadrature::segment_gauss5();
    for (q, p) in op.points.iter().enumerate() {
        assert_eq!(p.rule, JumpRule::Aggregated);
        assert_eq!(p.weight, 1.0);
        let e = &mesh.edges[p.edge];
        let a = mesh.vertices[e.vertices[0]];
        let b = mesh.vertices[e.vertices[1]];
        let integral: f64 = g
            .iter()
            .map(|&(t, w)| {
                let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                w * e.length * normal_jump(&s, &d, e.triangles[0].unwrap(), e.triangles[1].unwrap(), x, e.normal)
            })
            .sum();
        assert!((op.apply(&d, q) - integral).abs() < 1e-12);
    }
}

#[test]
fn p2_kink_across_vertical_edge() {
    // Two triangles sharing the edge x = 0; u = |x| is piecewise linear.
    let mesh = Mesh::from_parts(
        vec![[0.0, 0.0], [0.0, 1.0], [-1.0, 0.5], [1.0, 0.5]],
        vec![[0, 1, 2], [0, 3, 1]],
        |_, _| None,
    )
    .unwrap();
    let s = ElementSpace::new(ElementFamily::LagrangeP2, &mesh);
    let d: Vec<f64> = s.dofs.locations.iter().map(|p| p[0].abs()).collect();
    let op = build_edge_jump_operator(&s, &all_kinds(&mesh, BcKind::Free));
    assert_eq!(op.points.len(), 2);
    for q in 0..2 {
        assert!((op.apply(&d, q) - 2.0).abs() < 1e-12);
        assert!((op.points[q].weight - 0.5).abs() < 1e-15);
    }
}

#[test]
fn jump_is_invariant_under_triangle_swap() {
    // Same geometry, triangles listed in the opposite order.
    let v = vec![[0.0, 0.0], [0.0, 1.0], [-1.0, 0.3], [1.2, 0.6]];
    let a = Mesh::from_parts(v.clone(), vec![[0, 1, 2], [0, 3, 1]], |_, _| None).unwrap();
    let b = Mesh::from_parts(v, vec![[0, 3, 1], [0, 1, 2]], |_, _| None).unwrap();
    let u = Analytic {
        value: |p: Point| {
            if p[0] < 0.0 {
                p[0] * p[0] - p[1]
            } else {
                2.0 * p[0] + p[1] * p[0] - p[1]
            }
        },
        gradient: |_p: Point| [0.0, 0.0],
        hessian: |_p: Point| [0.0; 3],
    };
    let mut vals = Vec::new();
    for mesh in [&a, &b] {
        let s = ElementSpace::new(ElementFamily::LagrangeP2, mesh);
        let d = s.interpolate(&u);
        let op = build_edge_jump_operator(&s, &all_kinds(mesh, BcKind::Free));
        let mut j: Vec<(Point, f64)> = (0..op.points.len())
            .map(|q| (op.points[q].position, op.apply(&d, q)))
            .collect();
        j.sort_by(|x, y| x.0[1].total_cmp(&y.0[1]));
        vals.push(j);
    }
    for (x, y) in vals[0].iter().zip(&vals[1]) {
        assert!((x.1 - y.1).abs() < 1e-12);
    }
}

#[test]
fn boundary_rules_and_weights() {
    let mesh = square(2, CellPattern::Crossed);
    for family in FAMILIES {
        let s = ElementSpace::new(family, &mesh);
        let op = build_edge_jump_operator(&s, &all_kinds(&mesh, BcKind::Clamped));
        let mut sums = vec![0.0; mesh.num_edges()];
        for p in &op.points {
            sums[p.edge] += p.weight;
        }
        for (e, edge) in mesh.edges.iter().enumerate() {
            let aggregated = family == ElementFamily::HermiteP3 && !edge.is_boundary();
            let expect = if aggregated { 1.0 } else { edge.length };
            assert!((sums[e] - expect).abs() < 1e-12);
        }
        // Boundary s = −∂u/∂ν: for u = x on the right side (outward ν = +x), s = −1.
        let d = s.interpolate(&Poly([0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        for (q, p) in op.points.iter().enumerate() {
            let e = &mesh.edges[p.edge];
            if e.is_boundary() && mesh.tag(p.edge) == Some("right") {
                assert!((op.apply(&d, q) + 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn dirichlet_reduction_zeroes_the_trace() {
    let mesh = square(3, CellPattern::Diag);
    let bcs = BoundaryConditions::new([
        ("left", BcKind::Dirichlet),
        ("bottom", BcKind::Clamped),
        ("right", BcKind::Free),
        ("top", BcKind::Symmetry),
    ]);
    let kinds = bcs.edge_kinds(&mesh).unwrap();
    for family in FAMILIES {
        let s = ElementSpace::new(family, &mesh);
        let red = dirichlet_reduction(&s, &kinds).unwrap();
        let free: Vec<f64> = (0..red.num_free).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let full = red.expand_vector(&free);
        // u vanishes along every Dirichlet edge.
        for (e, edge) in mesh.edges.iter().enumerate() {
            if !kinds[e].is_some_and(BcKind::fixes_value) {
                continue;
            }
            let a = mesh.vertices[edge.vertices[0]];
            let b = mesh.vertices[edge.vertices[1]];
            for t in [0.0, 0.25, 0.5, 0.9, 1.0] {
                let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                assert!(s.eval(&full, edge.first(), x).value.abs() < 1e-12, "{family}");
            }
        }
        // Corner at the origin: full gradient fixed for Hermite.
        if family == ElementFamily::HermiteP3 {
            let v0 = mesh.vertices.iter().position(|p| *p == [0.0, 0.0]).unwrap();
            assert!(red.is_fixed(3 * v0 + 1) && red.is_fixed(3 * v0 + 2));
            // Mid-left vertex: only the normal (x) gradient stays free.
            let v = mesh
                .vertices
                .iter()
                .position(|p| p[0] == 0.0 && p[1] > 0.1 && p[1] < 0.9)
                .unwrap();
            assert_eq!(red.expand[3 * v + 1].len(), 1);
            assert_eq!(red.expand[3 * v + 2][0].1, 0.0);
        }
    }
}

#[test]
fn dirichlet_needs_three_non_aligned_points() {
    let mesh = square(2, CellPattern::Diag);
    let free = BoundaryConditions::new([
        ("left", BcKind::Free),
        ("right", BcKind::Free),
        ("bottom", BcKind::Free),
        ("top", BcKind::Free),
    ]);
    let kinds = free.edge_kinds(&mesh).unwrap();
    let s = ElementSpace::new(ElementFamily::LagrangeP2, &mesh);
    assert!(matches!(
        dirichlet_reduction(&s, &kinds),
        Err(FemError::DegenerateDirichlet(_))
    ));
    // A single straight side is aligned too.
    let one = BoundaryConditions::new([
        ("left", BcKind::Dirichlet),
        ("right", BcKind::Free),
        ("bottom", BcKind::Free),
        ("top", BcKind::Free),
    ]);
    let kinds = one.edge_kinds(&mesh).unwrap();
    assert!(matches!(
        dirichlet_reduction(&s, &kinds),
        Err(FemError::DegenerateDirichlet(_))
    ));
    let missing = BoundaryConditions::new([("left", BcKind::Dirichlet)]);
    assert!(matches!(
        missing.edge_kinds(&mesh),
        Err(FemError::MissingBoundaryCondition(_))
    ));
}
