//! Conforming triangulations of polygonal plate domains.
//!
//! A [`Mesh`] owns its vertices, counter-clockwise triangles and the derived
//! edge topology. Every constructor runs [`Mesh::from_parts`], so a `Mesh`
//! value always satisfies the conformity checks below.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use robust::{orient2d, Coord};
use thiserror::Error;

pub mod import;

pub use import::{import_mesh, MeshFormat};

/// Boundary tag assigned to boundary edges without region information.
pub const UNTAGGED: &str = "untagged";

#[derive(Error, Debug, Clone, PartialEq)]
pub enum MeshError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("mesh validation failed: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Point = [f64; 2];

/// Splitting rule for the cells of a structured rectangle mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellPattern {
    /// Two triangles per cell, split along the diagonal from the
    /// lower-right to the upper-left corner.
    Diag,
    /// Four triangles per cell, joined at the cell center.
    Crossed,
}

impl fmt::Display for CellPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellPattern::Diag => f.write_str("diag"),
            CellPattern::Crossed => f.write_str("crossed"),
        }
    }
}

/// An edge of the triangulation.
///
/// `triangles[0]` is the lower incident triangle index; `triangles[1]` is the
/// higher one, or `None` on the boundary. `normal` points from `triangles[0]`
/// into `triangles[1]`, or outward on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub triangles: [Option<usize>; 2],
    pub normal: Point,
    pub length: f64,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.triangles[1].is_none()
    }

    /// Index of the triangle on the "minus" side of the normal.
    pub fn first(&self) -> usize {
        self.triangles[0].expect("edge without triangle")
    }

    pub fn midpoint(&self, mesh: &Mesh) -> Point {
        let a = mesh.vertices[self.vertices[0]];
        let b = mesh.vertices[self.vertices[1]];
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    /// Unit tangent from `vertices[0]` to `vertices[1]`.
    pub fn tangent(&self, mesh: &Mesh) -> Point {
        let a = mesh.vertices[self.vertices[0]];
        let b = mesh.vertices[self.vertices[1]];
        [(b[0] - a[0]) / self.length, (b[1] - a[1]) / self.length]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    /// `triangle_edges[t][k]` is the edge opposite local vertex `k`.
    pub triangle_edges: Vec<[usize; 3]>,
    /// Region label of each boundary edge, keyed by edge index.
    pub boundary_tags: BTreeMap<usize, String>,
}

fn coord(p: Point) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

/// Sign-exact orientation of `(a, b, c)`: positive when counter-clockwise.
pub fn orientation(a: Point, b: Point, c: Point) -> f64 {
    orient2d(coord(a), coord(b), coord(c))
}

fn dist(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

impl Mesh {
    /// Builds the edge topology and validates the triangulation.
    ///
    /// `tag_of` assigns a region label to a boundary edge given its two
    /// vertex indices; `None` means [`UNTAGGED`].
    pub fn from_parts<F>(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, mut tag_of: F) -> Result<Mesh, MeshError>
    where
        F: FnMut(usize, usize) -> Option<String>,
    {
        if triangles.is_empty() {
            return Err(MeshError::Validation("mesh has no triangles".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= vertices.len() {
                    return Err(MeshError::Validation(format!(
                        "triangle {t} references missing vertex {v}"
                    )));
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::Validation(format!("triangle {t} repeats a vertex")));
            }
            let o = orientation(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if o <= 0.0 {
                return Err(MeshError::Validation(format!(
                    "triangle {t} has non-positive signed area"
                )));
            }
            if vertices[tri[0]]
                .iter()
                .chain(&vertices[tri[1]])
                .chain(&vertices[tri[2]])
                .any(|c| !c.is_finite())
            {
                return Err(MeshError::Validation(format!(
                    "triangle {t} has a non-finite coordinate"
                )));
            }
        }

        let mut seen: HashMap<[usize; 3], usize> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            let mut key = *tri;
            key.sort_unstable();
            if let Some(prev) = seen.insert(key, t) {
                return Err(MeshError::Validation(format!(
                    "triangle {t} duplicates triangle {prev}"
                )));
            }
        }

        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut raw: Vec<([usize; 2], Vec<usize>)> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut local = [0usize; 3];
            for k in 0..3 {
                let a = tri[(k + 1) % 3];
                let b = tri[(k + 2) % 3];
                let key = (a.min(b), a.max(b));
                let idx = *lookup.entry(key).or_insert_with(|| {
                    raw.push(([a, b], Vec::new()));
                    raw.len() - 1
                });
                raw[idx].1.push(t);
                local[k] = idx;
            }
            triangle_edges.push(local);
        }

        let mut edges = Vec::with_capacity(raw.len());
        let mut boundary_tags = BTreeMap::new();
        for (e, (verts, tris)) in raw.into_iter().enumerate() {
            if tris.len() > 2 {
                return Err(MeshError::Validation(format!(
                    "edge {}-{} is shared by {} triangles",
                    verts[0],
                    verts[1],
                    tris.len()
                )));
            }
            let a = vertices[verts[0]];
            let b = vertices[verts[1]];
            let length = dist(a, b);
            // Outward normal of the first triangle: the first triangle traverses
            // `verts` counter-clockwise, so the right-hand normal points out.
            let out = [(b[1] - a[1]) / length, -(b[0] - a[0]) / length];
            if tris.len() == 2 {
                // Consistent orientation: the second triangle must traverse the
                // edge in the opposite direction.
                let other = triangles[tris[1]];
                let pos = other.iter().position(|&v| v == verts[0]).unwrap();
                if other[(pos + 1) % 3] == verts[1] {
                    return Err(MeshError::Validation(format!(
                        "triangles {} and {} overlap across edge {}-{}",
                        tris[0], tris[1], verts[0], verts[1]
                    )));
                }
            }
            let edge = Edge {
                vertices: verts,
                triangles: [Some(tris[0]), tris.get(1).copied()],
                normal: out,
                length,
            };
            if edge.is_boundary() {
                let tag = tag_of(verts[0], verts[1]).unwrap_or_else(|| UNTAGGED.to_string());
                boundary_tags.insert(e, tag);
            }
            edges.push(edge);
        }

        let mesh = Mesh {
            vertices,
            triangles,
            edges,
            triangle_edges,
            boundary_tags,
        };
        mesh.check_conforming()?;
        mesh.check_euler()?;
        Ok(mesh)
    }

    /// Rejects vertices lying in the open interior of a boundary edge
    /// (hanging nodes).
    fn check_conforming(&self) -> Result<(), MeshError> {
        let mut used = vec![false; self.vertices.len()];
        for tri in &self.triangles {
            for &v in tri {
                used[v] = true;
            }
        }
        for (e, edge) in self.edges.iter().enumerate() {
            if !edge.is_boundary() {
                continue;
            }
            let a = self.vertices[edge.vertices[0]];
            let b = self.vertices[edge.vertices[1]];
            let (lo_x, hi_x) = (a[0].min(b[0]), a[0].max(b[0]));
            let (lo_y, hi_y) = (a[1].min(b[1]), a[1].max(b[1]));
            for (v, &p) in self.vertices.iter().enumerate() {
                if !used[v] || v == edge.vertices[0] || v == edge.vertices[1] {
                    continue;
                }
                if p[0] < lo_x || p[0] > hi_x || p[1] < lo_y || p[1] > hi_y {
                    continue;
                }
                if orientation(a, b, p) == 0.0 && p != a && p != b {
                    return Err(MeshError::Validation(format!(
                        "hanging node: vertex {v} lies inside edge {e} ({}-{})",
                        edge.vertices[0], edge.vertices[1]
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_euler(&self) -> Result<(), MeshError> {
        let used: std::collections::BTreeSet<usize> = self.triangles.iter().flatten().copied().collect();
        let v = used.len() as i64;
        let e = self.edges.len() as i64;
        let f = self.triangles.len() as i64;
        if v - e + f != 1 {
            return Err(MeshError::Validation(format!(
                "Euler characteristic V - E + F = {} (expected 1 for a simply connected domain)",
                v - e + f
            )));
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    }

    pub fn area(&self, t: usize) -> f64 {
        self.signed_area(t).abs()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.area(t)).sum()
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.corners(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Longest edge length of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        dist(a, b).max(dist(b, c)).max(dist(c, a))
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.boundary_tags.keys().copied()
    }

    pub fn tag(&self, edge: usize) -> Option<&str> {
        self.boundary_tags.get(&edge).map(String::as_str)
    }

    /// Applies `f` to every vertex. Orientation must be preserved (rigid
    /// motions, uniform scaling); the result is revalidated.
    pub fn transformed<F: Fn(Point) -> Point>(&self, f: F) -> Result<Mesh, MeshError> {
        let vertices = self.vertices.iter().map(|&p| f(p)).collect();
        let tags = self.tags_by_vertex_pair();
        Mesh::from_parts(vertices, self.triangles.clone(), |a, b| {
            tags.get(&(a.min(b), a.max(b))).cloned()
        })
    }

    fn tags_by_vertex_pair(&self) -> HashMap<(usize, usize), String> {
        self.boundary_tags
            .iter()
            .map(|(&e, tag)| {
                let [a, b] = self.edges[e].vertices;
                ((a.min(b), a.max(b)), tag.clone())
            })
            .collect()
    }

    /// Uniform red refinement: every triangle is split into four through its
    /// edge midpoints. Boundary tags are inherited by the half-edges.
    pub fn refine_uniform(&self) -> Mesh {
        let nv = self.num_vertices();
        let mut vertices = self.vertices.clone();
        vertices.extend(self.edges.iter().map(|e| e.midpoint(self)));
        let mut triangles = Vec::with_capacity(4 * self.num_triangles());
        for (t, tri) in self.triangles.iter().enumerate() {
            let m = self.triangle_edges[t].map(|e| nv + e);
            // m[k] is the midpoint opposite vertex k.
            triangles.push([tri[0], m[2], m[1]]);
            triangles.push([m[2], tri[1], m[0]]);
            triangles.push([m[1], m[0], tri[2]]);
            triangles.push([m[0], m[1], m[2]]);
        }
        let mut tags = HashMap::new();
        for (&e, tag) in &self.boundary_tags {
            let [a, b] = self.edges[e].vertices;
            let m = nv + e;
            tags.insert((a.min(m), a.max(m)), tag.clone());
            tags.insert((b.min(m), b.max(m)), tag.clone());
        }
        Mesh::from_parts(vertices, triangles, |a, b| tags.get(&(a.min(b), a.max(b))).cloned())
            .expect("refinement of a valid mesh is valid")
    }
}

/// Structured mesh of `[0, width] x [0, height]` with `nx * ny` cells.
///
/// Grid vertices come first in row-major order (`j * (nx + 1) + i`), followed
/// by the cell centers for [`CellPattern::Crossed`]. Boundary edges are tagged
/// `left`, `right`, `bottom` and `top`.
pub fn generate_rect_mesh(
    width: f64,
    height: f64,
    nx: usize,
    ny: usize,
    pattern: CellPattern,
) -> Result<Mesh, MeshError> {
    if nx == 0 || ny == 0 {
        return Err(MeshError::InvalidArgument(format!(
            "cell counts must be positive (nx = {nx}, ny = {ny})"
        )));
    }
    if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
        return Err(MeshError::InvalidArgument(format!(
            "dimensions must be positive (width = {width}, height = {height})"
        )));
    }
    let xs: Vec<f64> = (0..=nx)
        .map(|i| if i == nx { width } else { width * i as f64 / nx as f64 })
        .collect();
    let ys: Vec<f64> = (0..=ny)
        .map(|j| if j == ny { height } else { height * j as f64 / ny as f64 })
        .collect();
    let grid = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) + nx * ny);
    for &y in &ys {
        for &x in &xs {
            vertices.push([x, y]);
        }
    }
    let mut triangles = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let v00 = grid(i, j);
            let v10 = grid(i + 1, j);
            let v01 = grid(i, j + 1);
            let v11 = grid(i + 1, j + 1);
            match pattern {
                CellPattern::Diag => {
                    triangles.push([v00, v10, v01]);
                    triangles.push([v10, v11, v01]);
                }
                CellPattern::Crossed => {
                    let c = vertices.len();
                    vertices.push([0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])]);
                    triangles.push([v00, v10, c]);
                    triangles.push([v10, v11, c]);
                    triangles.push([v11, v01, c]);
                    triangles.push([v01, v00, c]);
                }
            }
        }
    }
    let n_grid = (nx + 1) * (ny + 1);
    Mesh::from_parts(vertices, triangles, |a, b| {
        if a >= n_grid || b >= n_grid {
            return None;
        }
        let (ia, ja) = (a % (nx + 1), a / (nx + 1));
        let (ib, jb) = (b % (nx + 1), b / (nx + 1));
        let side = if ia == 0 && ib == 0 {
            "left"
        } else if ia == nx && ib == nx {
            "right"
        } else if ja == 0 && jb == 0 {
            "bottom"
        } else if ja == ny && jb == ny {
            "top"
        } else {
            return None;
        };
        Some(side.to_string())
    })
}

/// Minimum over triangles of incircle diameter divided by triangle diameter.
pub fn nondegeneracy_ratio(mesh: &Mesh) -> Result<f64, MeshError> {
    let mut ratio = f64::INFINITY;
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.corners(t);
        let (la, lb, lc) = (dist(b, c), dist(c, a), dist(a, b));
        let area = mesh.area(t);
        if area <= 0.0 {
            return Err(MeshError::Validation(format!("triangle {t} is degenerate")));
        }
        let incircle = 4.0 * area / (la + lb + lc);
        ratio = ratio.min(incircle / la.max(lb).max(lc));
    }
    if ratio.is_finite() {
        Ok(ratio)
    } else {
        Err(MeshError::Validation("mesh has no triangles".into()))
    }
}

/// Largest triangle diameter relative to `domain_diameter`.
pub fn mesh_size(mesh: &Mesh, domain_diameter: f64) -> Result<f64, MeshError> {
    if mesh.triangles.is_empty() {
        return Err(MeshError::Validation("mesh has no triangles".into()));
    }
    if !(domain_diameter > 0.0) {
        return Err(MeshError::InvalidArgument(format!(
            "domain diameter must be positive, got {domain_diameter}"
        )));
    }
    let max = (0..mesh.num_triangles()).map(|t| mesh.diameter(t)).fold(0.0, f64::max);
    Ok(max / domain_diameter)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_invariants(mesh: &Mesh, domain_area: f64) {
        for t in 0..mesh.num_triangles() {
            assert!(mesh.signed_area(t) > 0.0);
        }
        for e in &mesh.edges {
            let n = e.triangles.iter().flatten().count();
            assert!(n == 1 || n == 2);
        }
        let v = mesh.num_vertices() as i64;
        assert_eq!(v - mesh.num_edges() as i64 + mesh.num_triangles() as i64, 1);
        let area = mesh.total_area();
        assert!((area - domain_area).abs() <= 1e-12 * domain_area);
    }

    #[test]
    fn single_crossed_cell_counts() {
        let m = generate_rect_mesh(1.0, 1.0, 1, 1, CellPattern::Crossed).unwrap();
        assert_eq!(m.num_triangles(), 4);
        assert_eq!(m.num_vertices(), 5);
        assert_eq!(m.num_edges(), 8);
        assert_eq!(m.boundary_tags.len(), 4);
        assert_invariants(&m, 1.0);
    }

    #[test]
    fn two_by_two_diag_counts() {
        let m = generate_rect_mesh(1.0, 1.0, 2, 2, CellPattern::Diag).unwrap();
        assert_eq!(m.num_triangles(), 8);
        assert_eq!(m.num_vertices(), 9);
        assert_eq!(m.num_edges(), 16);
        assert_invariants(&m, 1.0);
    }

    #[test]
    fn diag_cell_areas() {
        let m = generate_rect_mesh(1.5, 1.0, 3, 2, CellPattern::Diag).unwrap();
        for t in 0..m.num_triangles() {
            assert!((m.signed_area(t) - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            generate_rect_mesh(1.0, 1.0, 0, 1, CellPattern::Diag),
            Err(MeshError::InvalidArgument(_))
        ));
        assert!(matches!(
            generate_rect_mesh(-1.0, 1.0, 1, 1, CellPattern::Diag),
            Err(MeshError::InvalidArgument(_))
        ));
        assert!(matches!(
            generate_rect_mesh(1.0, 0.0, 1, 1, CellPattern::Crossed),
            Err(MeshError::InvalidArgument(_))
        ));
    }

    #[test]
    fn boundary_tags_cover_all_sides() {
        let m = generate_rect_mesh(2.0, 1.0, 4, 3, CellPattern::Crossed).unwrap();
        let mut count: BTreeMap<&str, usize> = BTreeMap::new();
        for tag in m.boundary_tags.values() {
            *count.entry(tag.as_str()).or_default() += 1;
        }
        assert_eq!(count["left"], 3);
        assert_eq!(count["right"], 3);
        assert_eq!(count["bottom"], 4);
        assert_eq!(count["top"], 4);
        for e in m.boundary_edges() {
            let edge = &m.edges[e];
            let mid = edge.midpoint(&m);
            let c = m.centroid(edge.first());
            let to_out = [mid[0] - c[0], mid[1] - c[1]];
            assert!(to_out[0] * edge.normal[0] + to_out[1] * edge.normal[1] > 0.0);
        }
    }

    #[test]
    fn interior_normals_point_to_higher_triangle() {
        let m = generate_rect_mesh(1.0, 1.0, 3, 3, CellPattern::Diag).unwrap();
        for e in &m.edges {
            if let [Some(lo), Some(hi)] = e.triangles {
                assert!(lo < hi);
                let a = m.centroid(lo);
                let b = m.centroid(hi);
                let d = [b[0] - a[0], b[1] - a[1]];
                assert!(d[0] * e.normal[0] + d[1] * e.normal[1] > 0.0);
            }
        }
    }

    #[test]
    fn equilateral_ratio() {
        let s3 = 3f64.sqrt();
        let m = Mesh::from_parts(
            vec![[0.0, 0.0], [1.0, 0.0], [0.5, s3 / 2.0]],
            vec![[0, 1, 2]],
            |_, _| None,
        )
        .unwrap();
        assert!((nondegeneracy_ratio(&m).unwrap() - 1.0 / s3).abs() < 1e-12);
    }

    #[test]
    fn right_isosceles_ratio() {
        let m = Mesh::from_parts(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], |_, _| None).unwrap();
        let expected = (2.0 - 2f64.sqrt()) / 2f64.sqrt();
        assert!((nondegeneracy_ratio(&m).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn ratio_is_independent_of_refinement_count() {
        let r1 = nondegeneracy_ratio(&generate_rect_mesh(1.0, 1.0, 1, 1, CellPattern::Diag).unwrap()).unwrap();
        for n in [2, 5, 16] {
            let m = generate_rect_mesh(1.0, 1.0, n, n, CellPattern::Diag).unwrap();
            assert!((nondegeneracy_ratio(&m).unwrap() - r1).abs() < 1e-12);
        }
    }

    #[test]
    fn mesh_size_of_crossed_cell() {
        let m = generate_rect_mesh(1.0, 1.0, 1, 1, CellPattern::Crossed).unwrap();
        let h = mesh_size(&m, 2f64.sqrt()).unwrap();
        assert!((h - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        let h2 = mesh_size(
            &generate_rect_mesh(1.0, 1.0, 2, 2, CellPattern::Crossed).unwrap(),
            2f64.sqrt(),
        )
        .unwrap();
        assert!((h2 - h / 2.0).abs() < 1e-15);
    }

    #[test]
    fn empty_mesh_is_rejected() {
        assert!(Mesh::from_parts(vec![[0.0, 0.0]], vec![], |_, _| None).is_err());
    }

    #[test]
    fn rejects_clockwise_and_degenerate() {
        let verts = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 0.0]];
        assert!(Mesh::from_parts(verts.clone(), vec![[0, 2, 1]], |_, _| None).is_err());
        assert!(Mesh::from_parts(verts, vec![[0, 1, 3]], |_, _| None).is_err());
    }

    #[test]
    fn detects_hanging_node() {
        // Coarse triangle on the left, two fine triangles on the right sharing
        // the midpoint of the coarse edge.
        let verts = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 2.0], [2.0, 1.0], [1.0, 1.0]];
        let tris = vec![[0, 1, 2], [1, 3, 4], [4, 3, 2]];
        let err = Mesh::from_parts(verts, tris, |_, _| None).unwrap_err();
        assert!(err.to_string().contains("vertex 4"), "{err}");
    }

    #[test]
    fn refinement_quadruples_and_halves() {
        let m = generate_rect_mesh(1.0, 1.0, 2, 2, CellPattern::Diag).unwrap();
        let r = m.refine_uniform();
        assert_eq!(r.num_triangles(), 4 * m.num_triangles());
        assert_invariants(&r, 1.0);
        let h0 = mesh_size(&m, 1.0).unwrap();
        let h1 = mesh_size(&r, 1.0).unwrap();
        assert!((h1 - h0 / 2.0).abs() < 1e-15);
        assert_eq!(r.boundary_tags.len(), 2 * m.boundary_tags.len());
        assert_eq!(r.boundary_tags.values().filter(|t| *t == "left").count(), 4);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_rect_mesh(1.3, 0.7, 5, 4, CellPattern::Crossed).unwrap();
        let b = generate_rect_mesh(1.3, 0.7, 5, 4, CellPattern::Crossed).unwrap();
        assert_eq!(a, b);
        for (p, q) in a.vertices.iter().zip(&b.vertices) {
            assert_eq!(p[0].to_bits(), q[0].to_bits());
            assert_eq!(p[1].to_bits(), q[1].to_bits());
        }
    }
}
