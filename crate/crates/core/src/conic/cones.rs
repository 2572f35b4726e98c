//! Cone algebra: Jordan products, Nesterov–Todd scaling and step lengths for
//! the nonnegative orthant and the second-order cone.

use super::Cone;

/// A cone block placed at `offset` in the variable vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Segment {
    pub cone: Cone,
    pub offset: usize,
}

impl Segment {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.cone.dim()
    }
}

pub(crate) fn segments(cones: &[Cone]) -> Vec<Segment> {
    let mut offset = 0;
    cones
        .iter()
        .map(|&cone| {
            let s = Segment { cone, offset };
            offset += cone.dim();
            s
        })
        .collect()
}

/// Barrier degree: one per orthant coordinate and per second-order cone.
pub(crate) fn degree(cones: &[Cone]) -> usize {
    cones
        .iter()
        .map(|c| match *c {
            Cone::Free(_) => 0,
            Cone::NonNeg(d) => d,
            Cone::Soc(_) => 1,
        })
        .sum()
}

/// Writes the cone identity (`1` on the orthant, `(1, 0, ..)` for SOC, `0`
/// on free blocks).
pub(crate) fn set_identity(cones: &[Segment], v: &mut [f64]) {
    for s in cones {
        let r = s.range();
        match s.cone {
            Cone::Free(_) => v[r].iter_mut().for_each(|x| *x = 0.0),
            Cone::NonNeg(_) => v[r].iter_mut().for_each(|x| *x = 1.0),
            Cone::Soc(_) => {
                v[r.clone()].iter_mut().for_each(|x| *x = 0.0);
                v[r.start] = 1.0;
            }
        }
    }
}

fn soc_residual(v: &[f64]) -> f64 {
    let tail: f64 = v[1..].iter().map(|x| x * x).sum();
    (v[0] - tail.sqrt()) * (v[0] + tail.sqrt())
}

/// Distance-like margin: `min` over cones of how deep `v` sits inside.
/// Negative when outside.
pub(crate) fn cone_margin(cones: &[Segment], v: &[f64]) -> f64 {
    let mut m = f64::INFINITY;
    for s in cones {
        let r = s.range();
        match s.cone {
            Cone::Free(_) => {}
            Cone::NonNeg(_) => {
                for &x in &v[r] {
                    m = m.min(x);
                }
            }
            Cone::Soc(_) => {
                let w = &v[r];
                let tail = w[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                m = m.min(w[0] - tail);
            }
        }
    }
    m
}

/// Nesterov–Todd scaling of one cone block.
#[derive(Debug, Clone)]
pub(crate) enum Scaling {
    Free,
    /// `W = diag(w)`
    NonNeg {
        w: Vec<f64>,
    },
    /// `W = eta * M(wbar)` with the hyperbolic reflection `M`.
    Soc {
        eta: f64,
        wbar: Vec<f64>,
    },
}

impl Scaling {
    /// Scaling for the interior pair `(x, z)` such that `W x = W⁻¹ z`.
    pub fn compute(cone: Cone, x: &[f64], z: &[f64]) -> Scaling {
        match cone {
            Cone::Free(_) => Scaling::Free,
            Cone::NonNeg(_) => Scaling::NonNeg {
                w: x.iter().zip(z).map(|(a, b)| (b / a).sqrt()).collect(),
            },
            Cone::Soc(_) => {
                let xr = soc_residual(x).max(f64::MIN_POSITIVE).sqrt();
                let zr = soc_residual(z).max(f64::MIN_POSITIVE).sqrt();
                let eta = (zr / xr).sqrt();
                let xbar: Vec<f64> = x.iter().map(|v| v / xr).collect();
                let zbar: Vec<f64> = z.iter().map(|v| v / zr).collect();
                let dot: f64 = xbar.iter().zip(&zbar).map(|(a, b)| a * b).sum();
                let gamma = ((1.0 + dot) / 2.0).sqrt();
                let mut wbar: Vec<f64> = Vec::with_capacity(x.len());
                wbar.push((zbar[0] + xbar[0]) / (2.0 * gamma));
                for i in 1..x.len() {
                    wbar.push((zbar[i] - xbar[i]) / (2.0 * gamma));
                }
                // Re-normalize onto the hyperboloid to limit drift.
                let tail: f64 = wbar[1..].iter().map(|v| v * v).sum();
                wbar[0] = (1.0 + tail).sqrt();
                Scaling::Soc { eta, wbar }
            }
        }
    }

    /// `out = W v` (or `W⁻¹ v` when `inverse`).
    pub fn apply(&self, v: &[f64], out: &mut [f64], inverse: bool) {
        match self {
            Scaling::Free => out.copy_from_slice(v),
            Scaling::NonNeg { w } => {
                for i in 0..v.len() {
                    out[i] = if inverse { v[i] / w[i] } else { v[i] * w[i] };
                }
            }
            Scaling::Soc { eta, wbar } => {
                // M(w) v = (w0 v0 + w1·v1, v1 + (v0 + w1·v1 / (1 + w0)) w1);
                // M(w)⁻¹ = M(J w).
                let sgn = if inverse { -1.0 } else { 1.0 };
                let scale = if inverse { 1.0 / eta } else { *eta };
                let w0 = wbar[0];
                let wv: f64 = sgn * wbar[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum::<f64>();
                out[0] = scale * (w0 * v[0] + wv);
                let coef = v[0] + wv / (1.0 + w0);
                for i in 1..v.len() {
                    out[i] = scale * (v[i] + coef * sgn * wbar[i]);
                }
            }
        }
    }

    /// Upper triangle of `W²` as a dense column-major square of side `dim`.
    pub fn squared(&self, dim: usize, out: &mut [f64]) {
        match self {
            Scaling::Free => out.iter_mut().for_each(|v| *v = 0.0),
            Scaling::NonNeg { w } => {
                out.iter_mut().for_each(|v| *v = 0.0);
                for i in 0..dim {
                    out[i * dim + i] = w[i] * w[i];
                }
            }
            Scaling::Soc { eta, wbar } => {
                // W² = eta² (2 w wᵀ - J)
                let e2 = eta * eta;
                for j in 0..dim {
                    for i in 0..dim {
                        let mut v = 2.0 * wbar[i] * wbar[j];
                        if i == j {
                            v += if i == 0 { -1.0 } else { 1.0 };
                        }
                        out[j * dim + i] = e2 * v;
                    }
                }
            }
        }
    }
}

/// Jordan product `u ∘ v` for one cone block.
pub(crate) fn circ(cone: Cone, u: &[f64], v: &[f64], out: &mut [f64]) {
    match cone {
        Cone::Free(_) => out.iter_mut().for_each(|x| *x = 0.0),
        Cone::NonNeg(_) => {
            for i in 0..u.len() {
                out[i] = u[i] * v[i];
            }
        }
        Cone::Soc(_) => {
            out[0] = u.iter().zip(v).map(|(a, b)| a * b).sum();
            for i in 1..u.len() {
                out[i] = u[0] * v[i] + v[0] * u[i];
            }
        }
    }
}

/// Solves `lambda ∘ q = r` for `q`.
pub(crate) fn circ_solve(cone: Cone, lambda: &[f64], r: &[f64], out: &mut [f64]) {
    match cone {
        Cone::Free(_) => out.iter_mut().for_each(|x| *x = 0.0),
        Cone::NonNeg(_) => {
            for i in 0..r.len() {
                out[i] = r[i] / lambda[i];
            }
        }
        Cone::Soc(_) => {
            let l0 = lambda[0];
            let rho = soc_residual(lambda);
            let lr: f64 = lambda[1..].iter().zip(&r[1..]).map(|(a, b)| a * b).sum();
            let q0 = (l0 * r[0] - lr) / rho;
            out[0] = q0;
            for i in 1..r.len() {
                out[i] = (r[i] - q0 * lambda[i]) / l0;
            }
        }
    }
}

/// Largest `alpha` with `v + alpha * dv` in the cone (capped at `cap`).
pub(crate) fn max_step(cone: Cone, v: &[f64], dv: &[f64], cap: f64) -> f64 {
    match cone {
        Cone::Free(_) => cap,
        Cone::NonNeg(_) => {
            let mut a = cap;
            for i in 0..v.len() {
                if dv[i] < 0.0 {
                    a = a.min(-v[i] / dv[i]);
                }
            }
            a
        }
        Cone::Soc(_) => {
            let mut a = cap;
            if dv[0] < 0.0 {
                a = a.min(-v[0] / dv[0]);
            }
            let qa = dv[0] * dv[0] - dv[1..].iter().map(|x| x * x).sum::<f64>();
            let qb = 2.0 * (v[0] * dv[0] - v[1..].iter().zip(&dv[1..]).map(|(x, y)| x * y).sum::<f64>());
            let qc = soc_residual(v).max(0.0);
            if let Some(root) = smallest_positive_root(qa, qb, qc) {
                a = a.min(root);
            }
            a.max(0.0)
        }
    }
}

fn smallest_positive_root(a: f64, b: f64, c: f64) -> Option<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return None;
    }
    if a.abs() <= 1e-14 * scale {
        return (b < 0.0).then(|| -c / b);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let t = -0.5 * (b + b.signum() * disc.sqrt());
    let mut best: Option<f64> = None;
    for r in [t / a, if t != 0.0 { c / t } else { f64::NAN }] {
        if r.is_finite() && r > 0.0 {
            best = Some(best.map_or(r, |b: f64| b.min(r)));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nt_scaling_maps_x_and_z_to_same_point() {
        let x = [2.0, 0.5, -0.7, 0.3];
        let z = [1.5, -0.2, 0.4, 0.9];
        let s = Scaling::compute(Cone::Soc(4), &x, &z);
        let mut wx = [0.0; 4];
        let mut wz = [0.0; 4];
        s.apply(&x, &mut wx, false);
        s.apply(&z, &mut wz, true);
        for i in 0..4 {
            assert!((wx[i] - wz[i]).abs() < 1e-12, "{wx:?} vs {wz:?}");
        }
        // W W⁻¹ = I
        let v = [0.3, 1.0, -2.0, 0.5];
        let mut a = [0.0; 4];
        let mut b = [0.0; 4];
        s.apply(&v, &mut a, true);
        s.apply(&a, &mut b, false);
        for i in 0..4 {
            assert!((b[i] - v[i]).abs() < 1e-12);
        }
        // W² x = z
        let mut w2 = [0.0; 16];
        s.squared(4, &mut w2);
        for i in 0..4 {
            let r: f64 = (0..4).map(|j| w2[j * 4 + i] * x[j]).sum();
            assert!((r - z[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn circ_solve_inverts_product() {
        let l = [3.0, 1.0, -1.5];
        let q = [0.2, -0.4, 0.9];
        let mut r = [0.0; 3];
        circ(Cone::Soc(3), &l, &q, &mut r);
        let mut back = [0.0; 3];
        circ_solve(Cone::Soc(3), &l, &r, &mut back);
        for i in 0..3 {
            assert!((back[i] - q[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn soc_step_hits_boundary() {
        let v = [1.0, 0.0, 0.0];
        let dv = [0.0, 1.0, 0.0];
        assert!((max_step(Cone::Soc(3), &v, &dv, 10.0) - 1.0).abs() < 1e-14);
        let dv = [1.0, 0.5, 0.0];
        assert_eq!(max_step(Cone::Soc(3), &v, &dv, 10.0), 10.0);
        let dv = [-1.0, 0.0, 0.0];
        assert!((max_step(Cone::Soc(3), &v, &dv, 10.0) - 1.0).abs() < 1e-14);
    }
}
