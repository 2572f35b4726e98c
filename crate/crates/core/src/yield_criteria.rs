//! Isotropic plate yield criteria through their support functions
//! `π(x, κ) = sup { M : κ : M ∈ G(x) }`.
//!
//! Curvatures and moments are symmetric 2×2 tensors stored as
//! `(κ11, κ22, κ12)`; the double contraction is
//! `M : κ = M11 κ11 + M22 κ22 + 2 M12 κ12`.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::conic::{Cone, ConicProgram, CscMatrix};
use crate::expr::Expr;
use crate::mesh::Point;

pub type Sym2 = [f64; 3];

#[derive(Error, Debug, Clone, PartialEq)]
pub enum YieldError {
    #[error("strength must be positive and finite, got {value} at ({x}, {y})")]
    NonPositiveStrength { value: f64, x: f64, y: f64 },
}

/// Frobenius norm of a symmetric tensor.
pub fn frobenius(k: Sym2) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + 2.0 * k[2] * k[2]).sqrt()
}

/// Eigenvalues `(κ_I, κ_II)` with `κ_I ≥ κ_II`.
pub fn eigenvalues(k: Sym2) -> (f64, f64) {
    let m = 0.5 * (k[0] + k[1]);
    let r = (0.5 * (k[0] - k[1])).hypot(k[2]);
    (m + r, m - r)
}

/// A positive strength field over the plate.
#[derive(Debug, Clone, PartialEq)]
pub enum StrengthField {
    Constant(f64),
    Expression(Expr),
}

impl StrengthField {
    pub fn eval(&self, x: Point) -> f64 {
        match self {
            StrengthField::Constant(v) => *v,
            StrengthField::Expression(e) => e.eval(x[0], x[1]),
        }
    }

    /// Value at `x`, rejecting nonpositive or non-finite strengths.
    pub fn checked(&self, x: Point) -> Result<f64, YieldError> {
        let value = self.eval(x);
        if value.is_finite() && value > 0.0 {
            Ok(value)
        } else {
            Err(YieldError::NonPositiveStrength {
                value,
                x: x[0],
                y: x[1],
            })
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, StrengthField::Constant(_))
    }

    /// The same field multiplied by `c`.
    pub fn scaled(&self, c: f64) -> StrengthField {
        match self {
            StrengthField::Constant(v) => StrengthField::Constant(c * v),
            StrengthField::Expression(e) => {
                let src = format!("({c:?})*({})", e.source());
                StrengthField::Expression(Expr::parse(&src).expect("scaled expression parses"))
            }
        }
    }
}

impl fmt::Display for StrengthField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrengthField::Constant(v) => write!(f, "{v}"),
            StrengthField::Expression(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum YieldCriterion {
    /// Strength set `m1² + m2² − m1 m2 ≤ M0²` on principal moments.
    VonMises(StrengthField),
    /// `max(|m1|, |m2|, |m1 − m2|) ≤ M0`.
    Tresca(StrengthField),
    /// `−M0⁻ ≤ m1, m2 ≤ M0⁺`.
    Johansen {
        positive: StrengthField,
        negative: StrengthField,
    },
}

/// Strength values of a criterion at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalStrength {
    VonMises(f64),
    Tresca(f64),
    Johansen { positive: f64, negative: f64 },
}

impl YieldCriterion {
    pub fn name(&self) -> &'static str {
        match self {
            YieldCriterion::VonMises(_) => "von_mises",
            YieldCriterion::Tresca(_) => "tresca",
            YieldCriterion::Johansen { .. } => "johansen",
        }
    }

    pub fn fields(&self) -> Vec<&StrengthField> {
        match self {
            YieldCriterion::VonMises(f) | YieldCriterion::Tresca(f) => vec![f],
            YieldCriterion::Johansen { positive, negative } => vec![positive, negative],
        }
    }

    pub fn has_constant_strength(&self) -> bool {
        self.fields().iter().all(|f| f.is_constant())
    }

    /// Every strength field multiplied by `c`.
    pub fn scaled(&self, c: f64) -> YieldCriterion {
        match self {
            YieldCriterion::VonMises(f) => YieldCriterion::VonMises(f.scaled(c)),
            YieldCriterion::Tresca(f) => YieldCriterion::Tresca(f.scaled(c)),
            YieldCriterion::Johansen { positive, negative } => YieldCriterion::Johansen {
                positive: positive.scaled(c),
                negative: negative.scaled(c),
            },
        }
    }

    pub fn local(&self, x: Point) -> Result<LocalStrength, YieldError> {
        Ok(match self {
            YieldCriterion::VonMises(f) => LocalStrength::VonMises(f.checked(x)?),
            YieldCriterion::Tresca(f) => LocalStrength::Tresca(f.checked(x)?),
            YieldCriterion::Johansen { positive, negative } => LocalStrength::Johansen {
                positive: positive.checked(x)?,
                negative: negative.checked(x)?,
            },
        })
    }

    /// Checks positivity of every field at the given points.
    pub fn validate_on(&self, points: impl IntoIterator<Item = Point>) -> Result<(), YieldError> {
        for x in points {
            self.local(x)?;
        }
        Ok(())
    }

    fn local_unchecked(&self, x: Point) -> LocalStrength {
        match self {
            YieldCriterion::VonMises(f) => LocalStrength::VonMises(f.eval(x)),
            YieldCriterion::Tresca(f) => LocalStrength::Tresca(f.eval(x)),
            YieldCriterion::Johansen { positive, negative } => LocalStrength::Johansen {
                positive: positive.eval(x),
                negative: negative.eval(x),
            },
        }
    }
}

impl LocalStrength {
    pub fn pi(&self, k: Sym2) -> f64 {
        match *self {
            LocalStrength::VonMises(m0) => {
                let q = k[0] * k[0] + k[1] * k[1] + k[0] * k[1] + k[2] * k[2];
                2.0 * m0 / 3f64.sqrt() * q.max(0.0).sqrt()
            }
            LocalStrength::Tresca(m0) => {
                let m = 0.5 * (k[0] + k[1]);
                let r = (0.5 * (k[0] - k[1])).hypot(k[2]);
                m0 * (m.abs() + r).max(2.0 * m.abs())
            }
            LocalStrength::Johansen { positive, negative } => {
                let (a, b) = eigenvalues(k);
                positive * (a.max(0.0) + b.max(0.0)) + negative * ((-a).max(0.0) + (-b).max(0.0))
            }
        }
    }

    /// `π(s ν⊗ν)` for a unit `ν`, as `c⁺ s⁺ + c⁻ s⁻`.
    pub fn edge_coefficients(&self) -> (f64, f64) {
        match *self {
            LocalStrength::VonMises(m0) => {
                let c = 2.0 * m0 / 3f64.sqrt();
                (c, c)
            }
            LocalStrength::Tresca(m0) => (m0, m0),
            LocalStrength::Johansen { positive, negative } => (positive, negative),
        }
    }

    pub fn pi_edge(&self, s: f64) -> f64 {
        let (cp, cn) = self.edge_coefficients();
        cp * s.max(0.0) + cn * (-s).max(0.0)
    }
}

/// `π(x, κ)` in closed form.
pub fn pi_eval(criterion: &YieldCriterion, x: Point, k: Sym2) -> f64 {
    criterion.local_unchecked(x).pi(k)
}

/// `π(x, s ν⊗ν)`; independent of the unit normal `ν`.
pub fn pi_edge(criterion: &YieldCriterion, x: Point, s: f64) -> f64 {
    criterion.local_unchecked(x).pi_edge(s)
}

/// One linear equality of a [`ConeBlock`]:
/// `Σ coef · local_var = Σ coef · slot`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockRow {
    pub vars: Vec<(usize, f64)>,
    pub slots: Vec<(usize, f64)>,
}

/// Conic encoding of `t ≥ π(x, ·)`.
///
/// The block owns local variables laid out as `cones`; `t` is the linear
/// form `objective · v`. The inputs enter through slots: three curvature
/// slots `(κ11, κ22, κ12)` for bulk blocks, one jump slot for edge blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeBlock {
    pub cones: Vec<Cone>,
    pub objective: Vec<f64>,
    pub rows: Vec<BlockRow>,
    pub num_slots: usize,
}

impl ConeBlock {
    pub fn num_vars(&self) -> usize {
        self.cones.iter().map(Cone::dim).sum()
    }

    /// Standalone program `min t` with the slots fixed to `values`.
    pub fn fixed_program(&self, values: &[f64]) -> ConicProgram {
        assert_eq!(values.len(), self.num_slots);
        let mut trip = Vec::new();
        let mut b = Vec::with_capacity(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in &row.vars {
                trip.push((i, j, v));
            }
            b.push(row.slots.iter().map(|&(k, v)| v * values[k]).sum());
        }
        let a = CscMatrix::from_triplets(self.rows.len(), self.num_vars(), &trip);
        ConicProgram::new(a, b, self.objective.clone(), self.cones.clone()).expect("cone block is well formed")
    }
}

fn row(vars: &[(usize, f64)], slots: &[(usize, f64)]) -> BlockRow {
    BlockRow {
        vars: vars.to_vec(),
        slots: slots.to_vec(),
    }
}

/// Epigraph block of `π(x, κ)` at a point.
pub fn emit_cone_block(criterion: &YieldCriterion, x: Point) -> Result<ConeBlock, YieldError> {
    Ok(cone_block(criterion.local(x)?))
}

pub fn cone_block(strength: LocalStrength) -> ConeBlock {
    let s3 = 3f64.sqrt();
    match strength {
        LocalStrength::VonMises(m0) => {
            // y = (y0, Wκ) ∈ SOC₄, t = 2M0/√3 · y0
            ConeBlock {
                cones: vec![Cone::Soc(4)],
                objective: vec![2.0 * m0 / s3, 0.0, 0.0, 0.0],
                rows: vec![
                    row(&[(1, 1.0)], &[(0, 1.0), (1, 0.5)]),
                    row(&[(2, 1.0)], &[(1, 0.5 * s3)]),
                    row(&[(3, 1.0)], &[(2, 1.0)]),
                ],
                num_slots: 3,
            }
        }
        LocalStrength::Tresca(m0) => {
            // Variables: [t, v, s1, s2, s3, s4] ≥ 0, then (r, d, k12) ∈ SOC₃.
            let (t, v, s1, s2, s3_, s4, r, d, k12) = (0, 1, 2, 3, 4, 5, 6, 7, 8);
            ConeBlock {
                cones: vec![Cone::NonNeg(6), Cone::Soc(3)],
                objective: vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
                rows: vec![
                    row(&[(d, 1.0)], &[(0, 0.5), (1, -0.5)]),
                    row(&[(k12, 1.0)], &[(2, 1.0)]),
                    // v ≥ m and v ≥ −m
                    row(&[(v, 1.0), (s1, -1.0)], &[(0, 0.5), (1, 0.5)]),
                    row(&[(v, 1.0), (s2, -1.0)], &[(0, -0.5), (1, -0.5)]),
                    // t ≥ M0 (v + r) and t ≥ 2 M0 v
                    row(&[(t, 1.0), (v, -m0), (r, -m0), (s3_, -1.0)], &[]),
                    row(&[(t, 1.0), (v, -2.0 * m0), (s4, -1.0)], &[]),
                ],
                num_slots: 3,
            }
        }
        LocalStrength::Johansen { positive, negative } => {
            // κ = P − N with P ~ (a0, a1, a2), N ~ (b0, b1, b2) ∈ SOC₃, where
            // a0 = tr P, a1 = p11 − p22, a2 = 2 p12.
            ConeBlock {
                cones: vec![Cone::Soc(3), Cone::Soc(3)],
                objective: vec![positive, 0.0, 0.0, negative, 0.0, 0.0],
                rows: vec![
                    row(&[(0, 0.5), (1, 0.5), (3, -0.5), (4, -0.5)], &[(0, 1.0)]),
                    row(&[(0, 0.5), (1, -0.5), (3, -0.5), (4, 0.5)], &[(1, 1.0)]),
                    row(&[(2, 0.5), (5, -0.5)], &[(2, 1.0)]),
                ],
                num_slots: 3,
            }
        }
    }
}

/// Local variables of [`cone_block`] satisfying its rows for the slot values
/// `k`, with `t = π(k)`.
pub fn cone_block_point(strength: LocalStrength, k: Sym2) -> Vec<f64> {
    let s3 = 3f64.sqrt();
    match strength {
        LocalStrength::VonMises(_) => {
            let w = [k[0] + 0.5 * k[1], 0.5 * s3 * k[1], k[2]];
            vec![(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt(), w[0], w[1], w[2]]
        }
        LocalStrength::Tresca(m0) => {
            let m = 0.5 * (k[0] + k[1]);
            let d = 0.5 * (k[0] - k[1]);
            let r = d.hypot(k[2]);
            let v = m.abs();
            let t = (m0 * (v + r)).max(2.0 * m0 * v);
            vec![t, v, v - m, v + m, t - m0 * (v + r), t - 2.0 * m0 * v, r, d, k[2]]
        }
        LocalStrength::Johansen { .. } => {
            // P and N are the positive and negative parts of κ.
            let (l1, l2) = eigenvalues(k);
            let d = 0.5 * (k[0] - k[1]);
            let r = d.hypot(k[2]);
            // Unit eigenvector direction of l1 in the (k11 − k22, 2 k12) plane.
            let (c2, s2) = if r > 0.0 { (d / r, k[2] / r) } else { (1.0, 0.0) };
            let part = |a: f64, b: f64| [a + b, (a - b) * c2, (a - b) * s2];
            let p = part(l1.max(0.0), l2.max(0.0));
            let n = part((-l1).max(0.0), (-l2).max(0.0));
            vec![p[0], p[1], p[2], n[0], n[1], n[2]]
        }
    }
}

/// Local variables of [`edge_block`] for the jump `s`, with `t = π_edge(s)`.
pub fn edge_block_point(s: f64) -> Vec<f64> {
    vec![s.max(0.0), (-s).max(0.0)]
}

/// Epigraph block of `π(x, s ν⊗ν)`: `s = p − n`, `t = c⁺ p + c⁻ n`.
pub fn emit_edge_block(criterion: &YieldCriterion, x: Point) -> Result<ConeBlock, YieldError> {
    Ok(edge_block(criterion.local(x)?))
}

pub fn edge_block(strength: LocalStrength) -> ConeBlock {
    let (cp, cn) = strength.edge_coefficients();
    ConeBlock {
        cones: vec![Cone::NonNeg(2)],
        objective: vec![cp, cn],
        rows: vec![row(&[(0, 1.0), (1, -1.0)], &[(0, 1.0)])],
        num_slots: 1,
    }
}

/// Radical inverse in base 2.
fn van_der_corput(mut k: u64) -> f64 {
    let mut v = 0.0;
    let mut f = 0.5;
    while k > 0 {
        if k & 1 == 1 {
            v += f;
        }
        k >>= 1;
        f *= 0.5;
    }
    v
}

/// `M = R(θ) diag(m1, m2) R(θ)ᵀ` as `(M11, M22, M12)`.
fn rotated_moment(m1: f64, m2: f64, theta: f64) -> Sym2 {
    let (s, c) = theta.sin_cos();
    [m1 * c * c + m2 * s * s, m1 * s * s + m2 * c * c, (m1 - m2) * s * c]
}

/// `n` moment tensors on the boundary of the strength set at `x`, forming
/// nested prefixes as `n` grows.
pub fn oracle_moments(criterion: &YieldCriterion, x: Point, n: usize) -> Vec<Sym2> {
    match criterion.local_unchecked(x) {
        LocalStrength::VonMises(m0) => {
            // Ellipse m1² + m2² − m1 m2 = M0², sampled on a plastic-number
            // lattice over (θ, φ).
            let g = 1.324_717_957_244_746_f64;
            let (a1, a2) = (1.0 / g, 1.0 / (g * g));
            (0..n)
                .map(|i| {
                    let theta = PI * (0.5 + a1 * i as f64).fract();
                    let phi = 2.0 * PI * (0.5 + a2 * i as f64).fract();
                    let (sp, cp) = phi.sin_cos();
                    let m1 = m0 * (cp + sp / 3f64.sqrt());
                    let m2 = 2.0 * m0 * sp / 3f64.sqrt();
                    rotated_moment(m1, m2, theta)
                })
                .collect()
        }
        LocalStrength::Tresca(m0) => {
            polygon_moments(&[(m0, m0), (m0, 0.0), (0.0, -m0), (-m0, -m0), (-m0, 0.0), (0.0, m0)], n)
        }
        LocalStrength::Johansen { positive, negative } => polygon_moments(
            &[
                (positive, positive),
                (positive, -negative),
                (-negative, -negative),
                (-negative, positive),
            ],
            n,
        ),
    }
}

/// Vertices of a principal-moment polygon cycled through, each paired with
/// a van der Corput angle.
fn polygon_moments(vertices: &[(f64, f64)], n: usize) -> Vec<Sym2> {
    let nv = vertices.len();
    (0..n)
        .map(|i| {
            let (m1, m2) = vertices[i % nv];
            rotated_moment(m1, m2, PI * van_der_corput((i / nv) as u64))
        })
        .collect()
}

/// `max_M M : κ` over a sample from [`oracle_moments`].
pub fn max_contraction(moments: &[Sym2], k: Sym2) -> f64 {
    moments
        .iter()
        .map(|m| m[0] * k[0] + m[1] * k[1] + 2.0 * m[2] * k[2])
        .fold(0.0, f64::max)
}

/// Lower estimate of `π(x, κ)` from `n` samples of the strength-set
/// boundary; nondecreasing in `n`.
pub fn brute_force_pi(criterion: &YieldCriterion, x: Point, k: Sym2, n: usize) -> f64 {
    max_contraction(&oracle_moments(criterion, x, n), k)
}

/// The fixed set of 64 unit-Frobenius directions used for coercivity
/// bounds (Fibonacci sphere in `(κ11, κ22, √2 κ12)`).
pub fn coercivity_directions() -> Vec<Sym2> {
    let n = 64;
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let a = golden * i as f64;
            [r * a.cos(), r * a.sin(), z / 2f64.sqrt()]
        })
        .collect()
}

/// `(α, β)` with `α |κ|_F ≤ π(x, κ) ≤ β |κ|_F` measured over `points` and
/// the fixed direction sample.
pub fn coercivity_bounds(criterion: &YieldCriterion, points: &[Point]) -> Result<(f64, f64), YieldError> {
    let dirs = coercivity_directions();
    let mut alpha = f64::INFINITY;
    let mut beta: f64 = 0.0;
    for &x in points {
        let s = criterion.local(x)?;
        for &k in &dirs {
            let v = s.pi(k) / frobenius(k);
            alpha = alpha.min(v);
            beta = beta.max(v);
        }
    }
    Ok((alpha, beta))
}
