//! Sparse LDLᵀ factorization of symmetric quasi-definite matrices.
//!
//! Up-looking factorization driven by the elimination tree. The input is the
//! upper triangle (diagonal included) of an already permuted matrix in CSC
//! form. Pivots whose sign disagrees with the expected inertia are replaced
//! by a small signed value (dynamic regularization).

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum LdlError {
    #[error("matrix is not upper triangular (entry in row {row}, column {col})")]
    NotUpperTriangular { row: usize, col: usize },
    #[error("column {0} has no diagonal entry")]
    MissingDiagonal(usize),
    #[error("non-finite pivot in column {0}")]
    NonFinite(usize),
}

const NONE: usize = usize::MAX;

/// Structure of `L` computed from the sparsity pattern alone.
#[derive(Debug, Clone)]
pub struct LdlSymbolic {
    n: usize,
    etree: Vec<usize>,
    lp: Vec<usize>,
}

impl LdlSymbolic {
    pub fn new(n: usize, colptr: &[usize], rowval: &[usize]) -> Result<Self, LdlError> {
        let mut work = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        let mut etree = vec![NONE; n];
        for j in 0..n {
            work[j] = j;
            let mut has_diag = false;
            for &row in &rowval[colptr[j]..colptr[j + 1]] {
                if row > j {
                    return Err(LdlError::NotUpperTriangular { row, col: j });
                }
                if row == j {
                    has_diag = true;
                }
                let mut i = row;
                while work[i] != j {
                    if etree[i] == NONE {
                        etree[i] = j;
                    }
                    lnz[i] += 1;
                    work[i] = j;
                    i = etree[i];
                }
            }
            if !has_diag {
                return Err(LdlError::MissingDiagonal(j));
            }
        }
        let mut lp = vec![0usize; n + 1];
        for i in 0..n {
            lp[i + 1] = lp[i] + lnz[i];
        }
        Ok(LdlSymbolic { n, etree, lp })
    }

    pub fn nnz_l(&self) -> usize {
        self.lp[self.n]
    }
}

/// Numeric factor `A = L D Lᵀ` with unit lower-triangular `L`.
#[derive(Debug, Clone)]
pub struct LdlFactor {
    n: usize,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
    dinv: Vec<f64>,
    /// Number of pivots replaced by regularization in the last factorization.
    pub regularized: usize,
}

/// Dynamic regularization parameters: a pivot `d` with `sign * d <= eps` is
/// replaced by `sign * delta`.
#[derive(Debug, Clone, Copy)]
pub struct PivotRegularization<'a> {
    pub signs: &'a [f64],
    pub eps: f64,
    pub delta: f64,
}

impl LdlFactor {
    pub fn new(sym: &LdlSymbolic) -> Self {
        let nnz = sym.nnz_l();
        LdlFactor {
            n: sym.n,
            lp: sym.lp.clone(),
            li: vec![0; nnz],
            lx: vec![0.0; nnz],
            d: vec![0.0; sym.n],
            dinv: vec![0.0; sym.n],
            regularized: 0,
        }
    }

    /// Factors the matrix with the given values (same pattern as `sym`).
    pub fn factor(
        &mut self,
        sym: &LdlSymbolic,
        colptr: &[usize],
        rowval: &[usize],
        values: &[f64],
        reg: Option<PivotRegularization<'_>>,
    ) -> Result<(), LdlError> {
        let n = self.n;
        let mut y_markers = vec![false; n];
        let mut y_vals = vec![0.0; n];
        let mut y_idx = vec![0usize; n];
        let mut elim = vec![0usize; n];
        let mut next_space: Vec<usize> = self.lp[..n].to_vec();
        self.regularized = 0;

        for k in 0..n {
            let mut nnz_y = 0;
            self.d[k] = 0.0;
            for p in colptr[k]..colptr[k + 1] {
                let bidx = rowval[p];
                if bidx == k {
                    self.d[k] = values[p];
                    continue;
                }
                y_vals[bidx] = values[p];
                if !y_markers[bidx] {
                    y_markers[bidx] = true;
                    elim[0] = bidx;
                    let mut n_elim = 1;
                    let mut next = sym.etree[bidx];
                    while next != NONE && next < k {
                        if y_markers[next] {
                            break;
                        }
                        y_markers[next] = true;
                        elim[n_elim] = next;
                        n_elim += 1;
                        next = sym.etree[next];
                    }
                    while n_elim > 0 {
                        n_elim -= 1;
                        y_idx[nnz_y] = elim[n_elim];
                        nnz_y += 1;
                    }
                }
            }
            for i in (0..nnz_y).rev() {
                let c = y_idx[i];
                let end = next_space[c];
                let yc = y_vals[c];
                for j in self.lp[c]..end {
                    y_vals[self.li[j]] -= self.lx[j] * yc;
                }
                self.li[end] = k;
                let l = yc * self.dinv[c];
                self.lx[end] = l;
                self.d[k] -= yc * l;
                next_space[c] += 1;
                y_vals[c] = 0.0;
                y_markers[c] = false;
            }
            if let Some(r) = reg {
                if r.signs[k] * self.d[k] <= r.eps {
                    self.d[k] = r.signs[k] * r.delta;
                    self.regularized += 1;
                }
            }
            if !self.d[k].is_finite() || self.d[k] == 0.0 {
                return Err(LdlError::NonFinite(k));
            }
            self.dinv[k] = 1.0 / self.d[k];
        }
        Ok(())
    }

    /// Solves `L D Lᵀ x = b` in place.
    pub fn solve(&self, x: &mut [f64]) {
        for i in 0..self.n {
            let xi = x[i];
            if xi != 0.0 {
                for j in self.lp[i]..self.lp[i + 1] {
                    x[self.li[j]] -= self.lx[j] * xi;
                }
            }
        }
        for i in 0..self.n {
            x[i] *= self.dinv[i];
        }
        for i in (0..self.n).rev() {
            let mut s = x[i];
            for j in self.lp[i]..self.lp[i + 1] {
                s -= self.lx[j] * x[self.li[j]];
            }
            x[i] = s;
        }
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.d
    }
}

/// `y = A x` for a symmetric matrix stored as its upper triangle.
pub fn sym_upper_mul(n: usize, colptr: &[usize], rowval: &[usize], values: &[f64], x: &[f64], y: &mut [f64]) {
    y[..n].iter_mut().for_each(|v| *v = 0.0);
    for j in 0..n {
        for p in colptr[j]..colptr[j + 1] {
            let i = rowval[p];
            let v = values[p];
            y[i] += v * x[j];
            if i != j {
                y[j] += v * x[i];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::sparse::CscMatrix;

    fn upper(n: usize, dense: &[Vec<f64>]) -> CscMatrix {
        let mut t = Vec::new();
        for j in 0..n {
            for i in 0..=j {
                if dense[i][j] != 0.0 || i == j {
                    t.push((i, j, dense[i][j]));
                }
            }
        }
        CscMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn solves_quasi_definite_system() {
        // [[4, 1, 1, 0], [1, 3, 0, 1], [1, 0, -2, 0.5], [0, 1, 0.5, -1]]
        let dense = vec![
            vec![4.0, 1.0, 1.0, 0.0],
            vec![1.0, 3.0, 0.0, 1.0],
            vec![1.0, 0.0, -2.0, 0.5],
            vec![0.0, 1.0, 0.5, -1.0],
        ];
        let a = upper(4, &dense);
        let sym = LdlSymbolic::new(4, &a.colptr, &a.rowval).unwrap();
        let mut f = LdlFactor::new(&sym);
        f.factor(&sym, &a.colptr, &a.rowval, &a.nzval, None).unwrap();
        let b = [1.0, 2.0, 3.0, 4.0];
        let mut x = b;
        f.solve(&mut x);
        for i in 0..4 {
            let r: f64 = (0..4).map(|j| dense[i][j] * x[j]).sum();
            assert!((r - b[i]).abs() < 1e-12);
        }
        let d = f.diagonal();
        assert!(d[0] > 0.0 && d[1] > 0.0 && d[2] < 0.0 && d[3] < 0.0);
    }

    #[test]
    fn rejects_lower_entries() {
        let a = CscMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 0, 1.0), (1, 1, 1.0)]);
        assert!(matches!(
            LdlSymbolic::new(2, &a.colptr, &a.rowval),
            Err(LdlError::NotUpperTriangular { .. })
        ));
    }

    #[test]
    fn regularizes_wrong_sign_pivot() {
        let a = CscMatrix::from_triplets(2, 2, &[(0, 0, 0.0), (1, 1, 1.0)]);
        let sym = LdlSymbolic::new(2, &a.colptr, &a.rowval).unwrap();
        let mut f = LdlFactor::new(&sym);
        let signs = [1.0, 1.0];
        f.factor(
            &sym,
            &a.colptr,
            &a.rowval,
            &a.nzval,
            Some(PivotRegularization {
                signs: &signs,
                eps: 1e-12,
                delta: 1e-7,
            }),
        )
        .unwrap();
        assert_eq!(f.regularized, 1);
        assert_eq!(f.diagonal()[0], 1e-7);
    }
}
