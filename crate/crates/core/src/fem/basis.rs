//! Local shape functions obtained by inverting the nodal-variable matrix on
//! a monomial basis in centered, diameter-scaled coordinates.

use nalgebra::DMatrix;

use super::ElementFamily;
use crate::mesh::Point;
use crate::yield_criteria::Sym2;

/// Values, physical gradients and Hessians of every local shape function.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeValues {
    pub values: Vec<f64>,
    pub gradients: Vec<[f64; 2]>,
    pub hessians: Vec<Sym2>,
}

fn exponents(degree: usize) -> Vec<(i32, i32)> {
    let mut e = Vec::new();
    for total in 0..=degree as i32 {
        for q in 0..=total {
            e.push((total - q, q));
        }
    }
    e
}

fn pw(x: f64, k: i32) -> f64 {
    if k < 0 {
        0.0
    } else {
        x.powi(k)
    }
}

/// Basis of one element. Shape function `k` is `Σ_j coef[j][k] ξ^p η^q`
/// with `(ξ, η) = (x − center) / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBasis {
    pub family: ElementFamily,
    center: Point,
    scale: f64,
    exps: Vec<(i32, i32)>,
    /// Column-major `n × n` coefficient matrix.
    coef: Vec<f64>,
}

impl LocalBasis {
    pub fn new(family: ElementFamily, corners: [Point; 3]) -> LocalBasis {
        let center = [
            (corners[0][0] + corners[1][0] + corners[2][0]) / 3.0,
            (corners[0][1] + corners[1][1] + corners[2][1]) / 3.0,
        ];
        let d = |a: Point, b: Point| (b[0] - a[0]).hypot(b[1] - a[1]);
        let scale = d(corners[0], corners[1])
            .max(d(corners[1], corners[2]))
            .max(d(corners[2], corners[0]));
        let exps = exponents(family.degree());
        let n = exps.len();
        let mut basis = LocalBasis {
            family,
            center,
            scale,
            exps,
            coef: Vec::new(),
        };
        // Row i: nodal variable i applied to every monomial.
        let mut nm = DMatrix::<f64>::zeros(n, n);
        let mid = |a: Point, b: Point| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        match family {
            ElementFamily::LagrangeP2 => {
                let pts = [
                    corners[0],
                    corners[1],
                    corners[2],
                    mid(corners[0], corners[1]),
                    mid(corners[1], corners[2]),
                    mid(corners[2], corners[0]),
                ];
                for (i, &p) in pts.iter().enumerate() {
                    let (v, _, _) = basis.monomials(p);
                    for j in 0..n {
                        nm[(i, j)] = v[j];
                    }
                }
            }
            ElementFamily::HermiteP3 => {
                let pts = [corners[0], corners[1], corners[2], center];
                for (i, &p) in pts.iter().enumerate() {
                    let (v, _, _) = basis.monomials(p);
                    for j in 0..n {
                        nm[(i, j)] = v[j];
                    }
                }
                for (k, &p) in corners.iter().enumerate() {
                    let (_, g, _) = basis.monomials(p);
                    for j in 0..n {
                        nm[(4 + 2 * k, j)] = g[j][0];
                        nm[(5 + 2 * k, j)] = g[j][1];
                    }
                }
            }
        }
        let inv = nm
            .try_inverse()
            .expect("nodal variables are unisolvent on a nondegenerate triangle");
        basis.coef = inv.as_slice().to_vec();
        basis
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    /// Monomial values, physical gradients and Hessians at `p`.
    fn monomials(&self, p: Point) -> (Vec<f64>, Vec<[f64; 2]>, Vec<Sym2>) {
        let s = self.scale;
        let x = (p[0] - self.center[0]) / s;
        let y = (p[1] - self.center[1]) / s;
        let mut v = Vec::with_capacity(self.exps.len());
        let mut g = Vec::with_capacity(self.exps.len());
        let mut h = Vec::with_capacity(self.exps.len());
        for &(a, b) in &self.exps {
            let (af, bf) = (a as f64, b as f64);
            v.push(pw(x, a) * pw(y, b));
            g.push([af * pw(x, a - 1) * pw(y, b) / s, bf * pw(x, a) * pw(y, b - 1) / s]);
            h.push([
                af * (af - 1.0) * pw(x, a - 2) * pw(y, b) / (s * s),
                bf * (bf - 1.0) * pw(x, a) * pw(y, b - 2) / (s * s),
                af * bf * pw(x, a - 1) * pw(y, b - 1) / (s * s),
            ]);
        }
        (v, g, h)
    }

    /// Shape functions at the physical point `p`.
    pub fn eval(&self, p: Point) -> ShapeValues {
        let n = self.len();
        let (mv, mg, mh) = self.monomials(p);
        let mut out = ShapeValues {
            values: vec![0.0; n],
            gradients: vec![[0.0; 2]; n],
            hessians: vec![[0.0; 3]; n],
        };
        for k in 0..n {
            let col = &self.coef[k * n..(k + 1) * n];
            for j in 0..n {
                let c = col[j];
                if c == 0.0 {
                    continue;
                }
                out.values[k] += c * mv[j];
                out.gradients[k][0] += c * mg[j][0];
                out.gradients[k][1] += c * mg[j][1];
                for r in 0..3 {
                    out.hessians[k][r] += c * mh[j][r];
                }
            }
        }
        out
    }
}
