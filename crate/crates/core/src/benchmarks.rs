//! Reference plate problems with known or documented collapse behavior.

use crate::assemble::LimitAnalysisResult;
use crate::expr::Expr;
use crate::fem::{BcKind, BoundaryConditions};
use crate::mesh::{generate_rect_mesh, CellPattern, Mesh};
use crate::yield_criteria::{StrengthField, YieldCriterion};

/// `λ⁺ L a² / M0` of the simply supported square, Johansen criterion.
pub const SIMPLY_SUPPORTED_SQUARE: f64 = 24.0;
/// `λ⁺ L a² / M0` of the clamped square, Johansen criterion.
pub const CLAMPED_SQUARE: f64 = 42.851;

/// Strength in bending of the inhomogeneous rectangular plate.
pub const INHOMOGENEOUS_STRENGTH: &str = "(cos(16*pi/3*x1) + 1) * (cos(6*pi*x2) + 1) + 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    Simple,
    Clamped,
}

impl Support {
    pub fn kind(self) -> BcKind {
        match self {
            Support::Simple => BcKind::Dirichlet,
            Support::Clamped => BcKind::Clamped,
        }
    }

    pub fn reference_lambda(self) -> f64 {
        match self {
            Support::Simple => SIMPLY_SUPPORTED_SQUARE,
            Support::Clamped => CLAMPED_SQUARE,
        }
    }
}

pub fn johansen(m0: f64) -> YieldCriterion {
    YieldCriterion::Johansen {
        positive: StrengthField::Constant(m0),
        negative: StrengthField::Constant(m0),
    }
}

/// Lower-left quarter `[0, 1/2]²` of the unit square with `n × n` cells:
/// supports on `left`/`bottom`, symmetry on `right`/`top`.
pub fn quarter_square(support: Support, n: usize, pattern: CellPattern) -> (Mesh, BoundaryConditions) {
    let mesh = generate_rect_mesh(0.5, 0.5, n, n, pattern).expect("positive cell count");
    let bcs = BoundaryConditions::new([
        ("left", support.kind()),
        ("bottom", support.kind()),
        ("right", BcKind::Symmetry),
        ("top", BcKind::Symmetry),
    ]);
    (mesh, bcs)
}

/// Simply supported `[0, 1.5] × [0, 1]` plate with the inhomogeneous von
/// Mises strength.
pub fn inhomogeneous_plate(nx: usize, ny: usize, pattern: CellPattern) -> (Mesh, BoundaryConditions, YieldCriterion) {
    let mesh = generate_rect_mesh(1.5, 1.0, nx, ny, pattern).expect("positive cell count");
    let bcs = BoundaryConditions::new(["left", "right", "bottom", "top"].map(|s| (s, BcKind::Dirichlet)));
    let field = StrengthField::Expression(Expr::parse(INHOMOGENEOUS_STRENGTH).expect("valid expression"));
    (mesh, bcs, YieldCriterion::VonMises(field))
}

/// Area-weighted mean cell dissipation density over the `fraction` of cells
/// with the lowest strength at their centroid, divided by the domain mean.
pub fn weak_zone_concentration(
    mesh: &Mesh,
    result: &LimitAnalysisResult,
    strength: &StrengthField,
    fraction: f64,
) -> f64 {
    let mut cells: Vec<(f64, usize)> = (0..mesh.num_triangles())
        .map(|t| (strength.eval(mesh.centroid(t)), t))
        .collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let take = ((fraction * cells.len() as f64).ceil() as usize).clamp(1, cells.len());
    let mean = |ts: &mut dyn Iterator<Item = usize>| {
        let (mut d, mut a) = (0.0, 0.0);
        for t in ts {
            d += result.cell_dissipation[t] * mesh.area(t);
            a += mesh.area(t);
        }
        d / a
    };
    let weak = mean(&mut cells[..take].iter().map(|c| c.1));
    let all = mean(&mut (0..mesh.num_triangles()));
    weak / all
}
