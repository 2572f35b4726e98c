//! Readers for Triangle `.node`/`.ele` and Gmsh MSH 2.2 ASCII meshes.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::{Mesh, MeshError, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    /// Triangle's `.node` + `.ele` pair; an optional `.edge` file supplies
    /// boundary markers.
    TriangleNodeEle,
    /// Gmsh MSH 2.2 ASCII.
    Msh2Ascii,
}

/// Reads and validates a mesh file.
///
/// For [`MeshFormat::TriangleNodeEle`] `path` may name the `.node` file, the
/// `.ele` file, or the common base path without extension.
pub fn import_mesh(path: &Path, format: MeshFormat) -> Result<Mesh, MeshError> {
    match format {
        MeshFormat::TriangleNodeEle => {
            let base = triangle_base(path);
            let node = read(&base.with_extension("node"))?;
            let ele = read(&base.with_extension("ele"))?;
            let edge_path = base.with_extension("edge");
            let edge = if edge_path.exists() {
                Some(read(&edge_path)?)
            } else {
                None
            };
            parse_triangle(&node, &ele, edge.as_deref())
        }
        MeshFormat::Msh2Ascii => parse_msh2(&read(path)?),
    }
}

fn triangle_base(path: &Path) -> PathBuf {
    match path.extension().and_then(|e| e.to_str()) {
        Some("node") | Some("ele") | Some("edge") => path.with_extension(""),
        _ => path.to_path_buf(),
    }
}

fn read(path: &Path) -> Result<String, MeshError> {
    fs::read_to_string(path).map_err(|e| MeshError::Io(format!("{}: {e}", path.display())))
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse {
        line,
        message: message.into(),
    }
}

/// Non-empty, comment-stripped lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let fields: Vec<&str> = l.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

fn num<T: std::str::FromStr>(line: usize, field: Option<&&str>, what: &str) -> Result<T, MeshError> {
    let s = field.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    s.parse().map_err(|_| parse_err(line, format!("invalid {what} '{s}'")))
}

fn parse_triangle(node: &str, ele: &str, edge: Option<&str>) -> Result<Mesh, MeshError> {
    let mut lines = data_lines(node);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty .node file"))?;
    let count: usize = num(hl, header.first(), "vertex count")?;
    let dim: usize = num(hl, header.get(1), "dimension")?;
    if dim != 2 {
        return Err(parse_err(hl, format!("dimension must be 2, got {dim}")));
    }
    let n_attr: usize = num(hl, header.get(2), "attribute count")?;
    let n_markers: usize = match header.get(3) {
        Some(_) => num(hl, header.get(3), "boundary marker count")?,
        None => 0,
    };

    let mut ids: HashMap<i64, usize> = HashMap::new();
    let mut vertices: Vec<Point> = Vec::with_capacity(count);
    let mut markers: Vec<i64> = Vec::with_capacity(count);
    for _ in 0..count {
        let (l, f) = lines
            .next()
            .ok_or_else(|| parse_err(hl, format!("expected {count} vertices")))?;
        let id: i64 = num(l, f.first(), "vertex id")?;
        let x: f64 = num(l, f.get(1), "x coordinate")?;
        let y: f64 = num(l, f.get(2), "y coordinate")?;
        let marker = if n_markers > 0 {
            num(l, f.get(3 + n_attr), "boundary marker")?
        } else {
            0
        };
        if ids.insert(id, vertices.len()).is_some() {
            return Err(parse_err(l, format!("duplicate vertex id {id}")));
        }
        vertices.push([x, y]);
        markers.push(marker);
    }

    let mut lines = data_lines(ele);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty .ele file"))?;
    let count: usize = num(hl, header.first(), "triangle count")?;
    let per: usize = num(hl, header.get(1), "nodes per triangle")?;
    if per != 3 {
        return Err(parse_err(hl, format!("only 3-node triangles are supported, got {per}")));
    }
    let mut triangles = Vec::with_capacity(count);
    for _ in 0..count {
        let (l, f) = lines
            .next()
            .ok_or_else(|| parse_err(hl, format!("expected {count} triangles")))?;
        let mut tri = [0usize; 3];
        for (k, slot) in tri.iter_mut().enumerate() {
            let id: i64 = num(l, f.get(1 + k), "vertex reference")?;
            *slot = *ids
                .get(&id)
                .ok_or_else(|| parse_err(l, format!("unknown vertex {id}")))?;
        }
        triangles.push(orient(&vertices, tri));
    }

    let mut edge_markers: HashMap<(usize, usize), i64> = HashMap::new();
    if let Some(edge) = edge {
        let mut lines = data_lines(edge);
        if let Some((hl, header)) = lines.next() {
            let count: usize = num(hl, header.first(), "edge count")?;
            let has_marker: usize = match header.get(1) {
                Some(_) => num(hl, header.get(1), "boundary marker count")?,
                None => 0,
            };
            for _ in 0..count {
                let (l, f) = lines
                    .next()
                    .ok_or_else(|| parse_err(hl, format!("expected {count} edges")))?;
                let a: i64 = num(l, f.get(1), "edge endpoint")?;
                let b: i64 = num(l, f.get(2), "edge endpoint")?;
                let (a, b) = match (ids.get(&a), ids.get(&b)) {
                    (Some(&a), Some(&b)) => (a, b),
                    _ => return Err(parse_err(l, "edge references unknown vertex")),
                };
                if has_marker > 0 {
                    let m: i64 = num(l, f.get(3), "edge marker")?;
                    edge_markers.insert((a.min(b), a.max(b)), m);
                }
            }
        }
    }

    let have_edges = !edge_markers.is_empty();
    Mesh::from_parts(vertices, triangles, |a, b| {
        let m = if have_edges {
            edge_markers.get(&(a.min(b), a.max(b))).copied().unwrap_or(0)
        } else if markers[a] == markers[b] {
            markers[a]
        } else {
            0
        };
        (m != 0).then(|| m.to_string())
    })
}

/// Returns the triangle in counter-clockwise order (degenerate ones are left
/// for validation to reject).
fn orient(vertices: &[Point], tri: [usize; 3]) -> [usize; 3] {
    if super::orientation(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]) < 0.0 {
        [tri[0], tri[2], tri[1]]
    } else {
        tri
    }
}

fn parse_msh2(text: &str) -> Result<Mesh, MeshError> {
    let lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, f)| !f.is_empty())
        .collect();
    let mut pos = 0;
    let mut names: HashMap<i64, String> = HashMap::new();
    let mut ids: HashMap<i64, usize> = HashMap::new();
    let mut vertices: Vec<Point> = Vec::new();
    let mut triangles = Vec::new();
    let mut line_tags: HashMap<(usize, usize), i64> = HashMap::new();
    let mut seen_format = false;

    let next = |pos: &mut usize, what: &str| -> Result<(usize, Vec<&str>), MeshError> {
        let last = lines.last().map(|l| l.0).unwrap_or(1);
        let item = lines
            .get(*pos)
            .cloned()
            .ok_or_else(|| parse_err(last, format!("unexpected end of file, expected {what}")))?;
        *pos += 1;
        Ok(item)
    };

    while pos < lines.len() {
        let (l, f) = next(&mut pos, "section")?;
        match f[0] {
            "$MeshFormat" => {
                let (l, f) = next(&mut pos, "format line")?;
                let version: f64 = num(l, f.first(), "format version")?;
                let file_type: i64 = num(l, f.get(1), "file type")?;
                if !(2.0..3.0).contains(&version) || file_type != 0 {
                    return Err(parse_err(l, "only MSH 2.x ASCII is supported"));
                }
                expect_end(next(&mut pos, "$EndMeshFormat")?, "$EndMeshFormat")?;
                seen_format = true;
            }
            "$PhysicalNames" => {
                let (l, f) = next(&mut pos, "physical name count")?;
                let n: usize = num(l, f.first(), "physical name count")?;
                for _ in 0..n {
                    let (l, f) = next(&mut pos, "physical name")?;
                    let tag: i64 = num(l, f.get(1), "physical tag")?;
                    let name = f.get(2..).map(|s| s.join(" ")).unwrap_or_default();
                    names.insert(tag, name.trim_matches('"').to_string());
                }
                expect_end(next(&mut pos, "$EndPhysicalNames")?, "$EndPhysicalNames")?;
            }
            "$Nodes" => {
                let (l, f) = next(&mut pos, "node count")?;
                let n: usize = num(l, f.first(), "node count")?;
                for _ in 0..n {
                    let (l, f) = next(&mut pos, "node")?;
                    let id: i64 = num(l, f.first(), "node id")?;
                    let x: f64 = num(l, f.get(1), "x coordinate")?;
                    let y: f64 = num(l, f.get(2), "y coordinate")?;
                    if ids.insert(id, vertices.len()).is_some() {
                        return Err(parse_err(l, format!("duplicate node id {id}")));
                    }
                    vertices.push([x, y]);
                }
                expect_end(next(&mut pos, "$EndNodes")?, "$EndNodes")?;
            }
            "$Elements" => {
                let (l, f) = next(&mut pos, "element count")?;
                let n: usize = num(l, f.first(), "element count")?;
                for _ in 0..n {
                    let (l, f) = next(&mut pos, "element")?;
                    let kind: i64 = num(l, f.get(1), "element type")?;
                    let ntags: usize = num(l, f.get(2), "tag count")?;
                    let physical: i64 = if ntags > 0 {
                        num(l, f.get(3), "physical tag")?
                    } else {
                        0
                    };
                    let node_ref = |k: usize| -> Result<usize, MeshError> {
                        let id: i64 = num(l, f.get(3 + ntags + k), "node reference")?;
                        ids.get(&id)
                            .copied()
                            .ok_or_else(|| parse_err(l, format!("unknown node {id}")))
                    };
                    match kind {
                        1 => {
                            let (a, b) = (node_ref(0)?, node_ref(1)?);
                            line_tags.insert((a.min(b), a.max(b)), physical);
                        }
                        2 => {
                            let tri = [node_ref(0)?, node_ref(1)?, node_ref(2)?];
                            triangles.push(orient(&vertices, tri));
                        }
                        15 => {}
                        other => return Err(parse_err(l, format!("unsupported element type {other}"))),
                    }
                }
                expect_end(next(&mut pos, "$EndElements")?, "$EndElements")?;
            }
            other if other.starts_with('$') => {
                // Skip unknown sections.
                let end = format!("$End{}", &other[1..]);
                loop {
                    let (_, f) = next(&mut pos, &end)?;
                    if f[0] == end {
                        break;
                    }
                }
            }
            _ => return Err(parse_err(l, format!("unexpected content '{}'", f.join(" ")))),
        }
    }
    if !seen_format {
        return Err(parse_err(1, "missing $MeshFormat section"));
    }
    Mesh::from_parts(vertices, triangles, |a, b| {
        line_tags
            .get(&(a.min(b), a.max(b)))
            .map(|&t| names.get(&t).cloned().unwrap_or_else(|| t.to_string()))
    })
}

fn expect_end((l, f): (usize, Vec<&str>), end: &str) -> Result<(), MeshError> {
    if f[0] == end {
        Ok(())
    } else {
        Err(parse_err(l, format!("expected {end}, found '{}'", f.join(" "))))
    }
}
