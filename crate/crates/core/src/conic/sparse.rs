//! Compressed sparse column storage.

/// A sparse matrix in CSC form. Row indices within a column are sorted and
/// unique.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub colptr: Vec<usize>,
    pub rowval: Vec<usize>,
    pub nzval: Vec<f64>,
}

impl CscMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CscMatrix {
            nrows,
            ncols,
            colptr: vec![0; ncols + 1],
            rowval: Vec::new(),
            nzval: Vec::new(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    ///
    /// Panics if an index is out of range.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut count = vec![0usize; ncols + 1];
        for &(i, j, _) in triplets {
            assert!(i < nrows && j < ncols, "triplet ({i}, {j}) out of range");
            count[j + 1] += 1;
        }
        for j in 0..ncols {
            count[j + 1] += count[j];
        }
        let mut next = count.clone();
        let mut rows = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(i, j, v) in triplets {
            rows[next[j]] = i;
            vals[next[j]] = v;
            next[j] += 1;
        }
        let mut colptr = vec![0usize; ncols + 1];
        let mut rowval = Vec::with_capacity(triplets.len());
        let mut nzval = Vec::with_capacity(triplets.len());
        let mut order: Vec<usize> = Vec::new();
        for j in 0..ncols {
            order.clear();
            order.extend(count[j]..count[j + 1]);
            order.sort_by_key(|&k| rows[k]);
            for &k in &order {
                if rowval.len() > colptr[j] && *rowval.last().unwrap() == rows[k] {
                    *nzval.last_mut().unwrap() += vals[k];
                } else {
                    rowval.push(rows[k]);
                    nzval.push(vals[k]);
                }
            }
            colptr[j + 1] = rowval.len();
        }
        CscMatrix {
            nrows,
            ncols,
            colptr,
            rowval,
            nzval,
        }
    }

    pub fn nnz(&self) -> usize {
        self.nzval.len()
    }

    /// Iterates `(row, col, value)` in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.ncols)
            .flat_map(move |j| (self.colptr[j]..self.colptr[j + 1]).map(move |k| (self.rowval[k], j, self.nzval[k])))
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        y.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.ncols {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            for k in self.colptr[j]..self.colptr[j + 1] {
                y[self.rowval[k]] += self.nzval[k] * xj;
            }
        }
    }

    /// `y = A^T x`
    pub fn tmul_vec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.nrows);
        debug_assert_eq!(y.len(), self.ncols);
        for j in 0..self.ncols {
            let mut s = 0.0;
            for k in self.colptr[j]..self.colptr[j + 1] {
                s += self.nzval[k] * x[self.rowval[k]];
            }
            y[j] = s;
        }
    }

    /// Number of stored entries in each row.
    pub fn row_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.nrows];
        for &i in &self.rowval {
            counts[i] += 1;
        }
        counts
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
