//! Regularized KKT system
//!
//! ```text
//! [ -(H + δI)   Aᵀ ] [dx]   [r1]
//! [     A       δI ] [dy] = [r2]
//! ```
//!
//! with `H = W²` on cone blocks and `0` on free blocks. The pattern is fixed
//! for the lifetime of a solve; only the `H` entries change between
//! iterations.

use super::cones::{Scaling, Segment};
use super::ldl::{sym_upper_mul, LdlError, LdlFactor, LdlSymbolic, PivotRegularization};
use super::sparse::{norm_inf, CscMatrix};
use super::Cone;

const DYN_REG_EPS: f64 = 1e-13;
const DYN_REG_DELTA: f64 = 2e-7;
const MAX_REFINE: usize = 10;
const REFINE_TOL: f64 = 1e-13;
const REG_RETRIES: usize = 2;
const REG_GROWTH: f64 = 100.0;

pub(crate) struct Kkt {
    n: usize,
    dim: usize,
    colptr: Vec<usize>,
    rowval: Vec<usize>,
    values: Vec<f64>,
    /// `iperm[old] = new`
    iperm: Vec<usize>,
    diag_x: Vec<usize>,
    /// Positions of the upper-triangle entries of each SOC block, column-major.
    soc_pos: Vec<(Segment, Vec<Option<usize>>)>,
    diag_y: Vec<usize>,
    signs: Vec<f64>,
    sym: LdlSymbolic,
    factor: LdlFactor,
    delta: f64,
    /// Static regularization used by the current factorization.
    applied_delta: f64,
    work: Vec<f64>,
    work2: Vec<f64>,
    w2: Vec<f64>,
}

impl Kkt {
    pub fn new(a: &CscMatrix, segs: &[Segment], delta: f64) -> Result<Kkt, LdlError> {
        let (m, n) = (a.nrows, a.ncols);
        let dim = n + m;
        // Original upper-triangle entries (row <= col).
        let mut entries: Vec<(usize, usize)> = Vec::with_capacity(n + m + a.nnz());
        let mut diag_x_k = vec![0usize; n];
        let mut soc_k: Vec<(Segment, Vec<Option<usize>>)> = Vec::new();
        for s in segs {
            match s.cone {
                Cone::Soc(d) => {
                    let mut ks = vec![None; d * d];
                    for jj in 0..d {
                        for ii in 0..=jj {
                            let k = entries.len();
                            entries.push((s.offset + ii, s.offset + jj));
                            ks[jj * d + ii] = Some(k);
                            if ii == jj {
                                diag_x_k[s.offset + ii] = k;
                            }
                        }
                    }
                    soc_k.push((*s, ks));
                }
                _ => {
                    for j in s.range() {
                        diag_x_k[j] = entries.len();
                        entries.push((j, j));
                    }
                }
            }
        }
        let a_start = entries.len();
        for (i, j, _) in a.triplets() {
            entries.push((j, n + i));
        }
        let diag_y_start = entries.len();
        for i in 0..m {
            entries.push((n + i, n + i));
        }

        // AMD ordering on the upper pattern.
        let mut count = vec![0usize; dim + 1];
        for &(_, c) in &entries {
            count[c + 1] += 1;
        }
        for j in 0..dim {
            count[j + 1] += count[j];
        }
        let mut next = count.clone();
        let mut rows = vec![0usize; entries.len()];
        for &(r, c) in &entries {
            rows[next[c]] = r;
            next[c] += 1;
        }
        let (_, iperm) = if dim > 0 {
            let control = amd::Control::default();
            let (p, pinv, _) =
                amd::order::<usize>(dim, &count, &rows, &control).map_err(|_| LdlError::MissingDiagonal(0))?;
            (p, pinv)
        } else {
            (Vec::new(), Vec::new())
        };

        // Permuted upper-triangle CSC.
        let mut pcount = vec![0usize; dim + 1];
        let permuted: Vec<(usize, usize)> = entries
            .iter()
            .map(|&(r, c)| {
                let (pr, pc) = (iperm[r], iperm[c]);
                (pr.min(pc), pr.max(pc))
            })
            .collect();
        for &(_, c) in &permuted {
            pcount[c + 1] += 1;
        }
        for j in 0..dim {
            pcount[j + 1] += pcount[j];
        }
        let mut order: Vec<usize> = (0..permuted.len()).collect();
        order.sort_by_key(|&k| (permuted[k].1, permuted[k].0));
        let mut pos = vec![0usize; permuted.len()];
        let mut rowval = vec![0usize; permuted.len()];
        for (p, &k) in order.iter().enumerate() {
            pos[k] = p;
            rowval[p] = permuted[k].0;
        }
        let colptr = pcount;

        let sym = LdlSymbolic::new(dim, &colptr, &rowval)?;
        let factor = LdlFactor::new(&sym);
        let mut values = vec![0.0; permuted.len()];
        for (k, (_, _, v)) in a.triplets().enumerate() {
            values[pos[a_start + k]] = v;
        }
        let mut signs = vec![0.0; dim];
        for j in 0..n {
            signs[iperm[j]] = -1.0;
        }
        for i in 0..m {
            signs[iperm[n + i]] = 1.0;
        }
        let soc_pos = soc_k
            .into_iter()
            .map(|(s, ks)| (s, ks.into_iter().map(|k| k.map(|k| pos[k])).collect()))
            .collect();
        let max_soc = segs
            .iter()
            .map(|s| if let Cone::Soc(d) = s.cone { d * d } else { 0 })
            .max()
            .unwrap_or(0);
        Ok(Kkt {
            n,
            dim,
            colptr,
            rowval,
            values,
            diag_x: diag_x_k.iter().map(|&k| pos[k]).collect(),
            soc_pos,
            diag_y: (0..m).map(|i| pos[diag_y_start + i]).collect(),
            iperm,
            signs,
            sym,
            factor,
            delta,
            applied_delta: delta,
            work: vec![0.0; dim],
            work2: vec![0.0; dim],
            w2: vec![0.0; max_soc],
        })
    }

    /// Writes `-(W² + δI)` into the primal block, starting from `delta`, and
    /// factors. When the factorization breaks down, retries with a larger
    /// static regularization; refinement in [`Kkt::solve`] always targets
    /// the unregularized matrix.
    pub fn update_and_factor(
        &mut self,
        segs: &[Segment],
        scalings: &[Scaling],
        mut delta: f64,
    ) -> Result<usize, LdlError> {
        let mut last = None;
        for _ in 0..=REG_RETRIES {
            self.fill(segs, scalings, delta);
            match self.factor.factor(
                &self.sym,
                &self.colptr,
                &self.rowval,
                &self.values,
                Some(PivotRegularization {
                    signs: &self.signs,
                    eps: DYN_REG_EPS,
                    delta: DYN_REG_DELTA,
                }),
            ) {
                Ok(()) => {
                    self.applied_delta = delta;
                    return Ok(self.factor.regularized);
                }
                Err(e) => last = Some(e),
            }
            delta *= REG_GROWTH;
        }
        Err(last.expect("at least one attempt"))
    }

    fn fill(&mut self, segs: &[Segment], scalings: &[Scaling], delta: f64) {
        let mut soc_iter = self.soc_pos.iter();
        for (s, sc) in segs.iter().zip(scalings) {
            match s.cone {
                Cone::Free(_) => {
                    for j in s.range() {
                        self.values[self.diag_x[j]] = -delta;
                    }
                }
                Cone::NonNeg(_) => {
                    if let Scaling::NonNeg { w } = sc {
                        for (k, j) in s.range().enumerate() {
                            self.values[self.diag_x[j]] = -(w[k] * w[k]) - delta;
                        }
                    }
                }
                Cone::Soc(d) => {
                    let (_, positions) = soc_iter.next().expect("soc block");
                    let w2 = &mut self.w2[..d * d];
                    sc.squared(d, w2);
                    for jj in 0..d {
                        for ii in 0..=jj {
                            let p = positions[jj * d + ii].expect("upper entry");
                            let mut v = -w2[jj * d + ii];
                            if ii == jj {
                                v -= delta;
                            }
                            self.values[p] = v;
                        }
                    }
                }
            }
        }
        for &p in &self.diag_y {
            self.values[p] = delta;
        }
    }

    /// Solves the unregularized system with iterative refinement. `rhs` and
    /// `out` are in original ordering (`x` block first, then `y`).
    pub fn solve(&mut self, rhs: &[f64], out: &mut [f64]) -> f64 {
        let dim = self.dim;
        let mut b = vec![0.0; dim];
        for i in 0..dim {
            b[self.iperm[i]] = rhs[i];
        }
        let mut x = b.clone();
        self.factor.solve(&mut x);
        let bnorm = norm_inf(&b);
        let mut rnorm = self.residual(&b, &x);
        for _ in 0..MAX_REFINE {
            if rnorm <= REFINE_TOL * (1.0 + bnorm) {
                break;
            }
            let mut dx = self.work.clone();
            self.factor.solve(&mut dx);
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
            let tnorm = self.residual(&b, &trial);
            if tnorm >= rnorm {
                break;
            }
            x = trial;
            rnorm = tnorm;
        }
        for i in 0..dim {
            out[i] = x[self.iperm[i]];
        }
        rnorm / (1.0 + bnorm)
    }

    /// Stores `b - K x` in `self.work` and returns its infinity norm, where
    /// `K` is the matrix without static regularization.
    fn residual(&mut self, b: &[f64], x: &[f64]) -> f64 {
        sym_upper_mul(self.dim, &self.colptr, &self.rowval, &self.values, x, &mut self.work2);
        let mut norm: f64 = 0.0;
        for i in 0..self.dim {
            // K_reg has -δ on the x block and +δ on the y block: K = K_reg - δ·sign
            let kx = self.work2[i] - self.applied_delta * self.signs[i] * x[i];
            let r = b[i] - kx;
            self.work[i] = r;
            norm = norm.max(r.abs());
        }
        norm
    }

    pub fn base_delta(&self) -> f64 {
        self.delta
    }

    pub fn num_primal(&self) -> usize {
        self.n
    }
}
