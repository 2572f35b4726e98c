//! Result files: JSON records, convergence CSV, VTK fields and SVG plots.
//!
//! Every writer is a pure function of its inputs, so identical runs
//! produce identical bytes.

use std::fmt::Write as _;

use serde::Serialize;

use platelimit::{ElementSpace, LimitAnalysisResult, Mesh};

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h: f64,
    pub dofs: usize,
    /// Normalized multiplier; absent when the level failed.
    pub lambda: Option<f64>,
    pub relative_error: Option<f64>,
    /// Solve wall time; only filled with `--timings`.
    pub seconds: Option<f64>,
    pub rigor: String,
    pub status: String,
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Legacy ASCII VTK with the mechanism at the vertices and the cell
/// dissipation density.
pub fn vtk(mesh: &Mesh, space: &ElementSpace, result: &LimitAnalysisResult) -> String {
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\nplatelimit mechanism\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {} double", mesh.vertices.len());
    for p in &mesh.vertices {
        let _ = writeln!(out, "{:e} {:e} 0", p[0], p[1]);
    }
    let nt = mesh.triangles.len();
    let _ = writeln!(out, "CELLS {nt} {}", 4 * nt);
    for t in &mesh.triangles {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(out, "CELL_TYPES {nt}");
    for _ in 0..nt {
        out.push_str("5\n");
    }

    let mut owner = vec![usize::MAX; mesh.vertices.len()];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for &v in tri {
            if owner[v] == usize::MAX {
                owner[v] = t;
            }
        }
    }
    let _ = writeln!(
        out,
        "POINT_DATA {}\nSCALARS u double 1\nLOOKUP_TABLE default",
        mesh.vertices.len()
    );
    for (v, p) in mesh.vertices.iter().enumerate() {
        let value = if owner[v] == usize::MAX {
            0.0
        } else {
            space.eval(&result.u, owner[v], *p).value
        };
        let _ = writeln!(out, "{:e}", value);
    }
    let _ = writeln!(
        out,
        "CELL_DATA {nt}\nSCALARS dissipation double 1\nLOOKUP_TABLE default"
    );
    for d in &result.cell_dissipation {
        let _ = writeln!(out, "{:e}", d);
    }
    out
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 70.0;

/// Log-log plot of `|relative error|` against `h`. Points with zero or
/// missing error are skipped; `None` when fewer than one point remains.
pub fn convergence_svg(rows: &[ConvergenceRow]) -> Option<String> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.relative_error.map(|e| (r.h, e.abs())))
        .filter(|&(h, e)| h > 0.0 && e > 0.0)
        .collect();
    if points.is_empty() {
        return None;
    }
    let decades = |lo: f64, hi: f64| {
        let a = lo.log10().floor();
        let b = hi.log10().ceil();
        (a, if b > a { b } else { a + 1.0 })
    };
    let (hx0, hx1) = decades(
        points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        points.iter().map(|p| p.0).fold(0.0, f64::max),
    );
    let (ey0, ey1) = decades(
        points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
        points.iter().map(|p| p.1).fold(0.0, f64::max),
    );
    let sx = |h: f64| MARGIN + (h.log10() - hx0) / (hx1 - hx0) * (WIDTH - 2.0 * MARGIN);
    let sy = |e: f64| HEIGHT - MARGIN - (e.log10() - ey0) / (ey1 - ey0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    s.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    s.push('\n');
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{left} {top}V{bottom}H{right}" fill="none" stroke="black"/>"#
    );
    for k in hx0 as i32..=hx1 as i32 {
        let x = sx(10f64.powi(k));
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{k}</text>"#,
            bottom + 6.0,
            bottom + 20.0
        );
    }
    for k in ey0 as i32..=ey1 as i32 {
        let y = sy(10f64.powi(k));
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{k}</text>"#,
            left - 6.0,
            left - 9.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">h</text>"#,
        (left + right) / 2.0,
        HEIGHT - 20.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">relative error</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0
    );
    let coords: Vec<String> = points
        .iter()
        .map(|&(h, e)| format!("{:.2},{:.2}", sx(h), sy(e)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#,
        coords.join(" ")
    );
    for c in &coords {
        let (x, y) = c.split_once(',').expect("coordinate pair");
        let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="3" fill="steelblue"/>"#);
    }
    s.push_str("</svg>\n");
    Some(s)
}
