//! Primal-dual interior-point solver for conic programs in standard form
//!
//! ```text
//! minimize    cᵀx
//! subject to  A x = b,  x ∈ K
//! ```
//!
//! where `K` is a product of free blocks, nonnegative orthants and
//! second-order cones `{(t, v) : t ≥ ‖v‖}`. The dual is
//! `maximize bᵀy  s.t.  Aᵀy + z = c, z ∈ K*` (with `z = 0` on free blocks).
//!
//! The solver runs a homogeneous self-dual embedding with Nesterov–Todd
//! scaling and Mehrotra predictor-corrector steps; Newton systems are solved
//! by a sparse LDLᵀ factorization of the regularized quasi-definite KKT
//! matrix under an approximate minimum degree ordering.

mod cones;
pub mod dump;
mod ipm;
mod kkt;
pub mod ldl;
pub mod sparse;

use std::fmt;

use thiserror::Error;

pub use dump::{read_dump, write_dump};
pub use ipm::solve;
pub use sparse::CscMatrix;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ConicError {
    #[error("invalid conic program: {0}")]
    InvalidProgram(String),
    #[error("dump format error at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

/// One block of the cone product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cone {
    Free(usize),
    NonNeg(usize),
    /// `(t, v) ∈ R × R^(dim-1)` with `t ≥ ‖v‖`.
    Soc(usize),
}

impl Cone {
    pub fn dim(&self) -> usize {
        match *self {
            Cone::Free(d) | Cone::NonNeg(d) | Cone::Soc(d) => d,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConicProgram {
    pub a: CscMatrix,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub cones: Vec<Cone>,
}

impl ConicProgram {
    /// Validates dimensions, cone sizes and finiteness.
    ///
    /// Rows without entries are accepted: the solver certifies infeasibility
    /// when such a row has a nonzero right-hand side and drops it otherwise.
    pub fn new(a: CscMatrix, b: Vec<f64>, c: Vec<f64>, cones: Vec<Cone>) -> Result<Self, ConicError> {
        if a.nrows != b.len() {
            return Err(ConicError::InvalidProgram(format!(
                "A has {} rows but b has length {}",
                a.nrows,
                b.len()
            )));
        }
        if a.ncols != c.len() {
            return Err(ConicError::InvalidProgram(format!(
                "A has {} columns but c has length {}",
                a.ncols,
                c.len()
            )));
        }
        let total: usize = cones.iter().map(Cone::dim).sum();
        if total != a.ncols {
            return Err(ConicError::InvalidProgram(format!(
                "cone dimensions sum to {total}, expected {}",
                a.ncols
            )));
        }
        if let Some(cone) = cones.iter().find(|c| match c {
            Cone::Soc(d) => *d < 2,
            other => other.dim() == 0,
        }) {
            return Err(ConicError::InvalidProgram(format!("invalid cone {cone:?}")));
        }
        if a.nzval.iter().chain(&b).chain(&c).any(|v| !v.is_finite()) {
            return Err(ConicError::InvalidProgram("non-finite data".into()));
        }
        Ok(ConicProgram { a, b, c, cones })
    }

    pub fn num_rows(&self) -> usize {
        self.a.nrows
    }

    pub fn num_cols(&self) -> usize {
        self.a.ncols
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        sparse::dot(&self.c, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub tol_feas: f64,
    pub tol_gap: f64,
    /// Tolerance on normalized Farkas certificates.
    pub tol_infeas: f64,
    pub max_iter: usize,
    /// Static regularization of the KKT matrix.
    pub static_reg: f64,
    /// Ruiz equilibration passes (0 disables scaling).
    pub equilibration_passes: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tol_feas: 1e-8,
            tol_gap: 1e-8,
            tol_infeas: 1e-8,
            max_iter: 200,
            static_reg: 1e-8,
            equilibration_passes: 15,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIter,
    Numerical,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::PrimalInfeasible => "primal_infeasible",
            Status::DualInfeasible => "dual_infeasible",
            Status::MaxIter => "max_iter",
            Status::Numerical => "numerical",
        })
    }
}

/// Relative residuals, see [`residuals`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

/// One interior-point iteration, for logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub residuals: Residuals,
    pub mu: f64,
    pub tau: f64,
    pub kappa: f64,
    pub sigma: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConicSolution {
    pub status: Status,
    /// Set when optimality was declared on stagnation with residuals within
    /// ten times the requested tolerances.
    pub reduced_accuracy: bool,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub residuals: Residuals,
    /// For infeasibility statuses: norm of the certificate residual
    /// (`‖Aᵀy + z‖` with `bᵀy = 1`, or `‖Ax‖` with `cᵀx = -1`).
    pub certificate_residual: Option<f64>,
    pub iterations: usize,
    pub log: Vec<IterationRecord>,
}

/// Relative residuals of a candidate primal-dual point:
/// `‖Ax−b‖/(1+‖b‖)`, `‖Aᵀy+z−c‖/(1+‖c‖)` and
/// `|cᵀx−bᵀy|/(1+|cᵀx|+|bᵀy|)`.
pub fn residuals(program: &ConicProgram, x: &[f64], y: &[f64], z: &[f64]) -> Residuals {
    let (m, n) = (program.num_rows(), program.num_cols());
    assert_eq!(x.len(), n, "x has wrong length");
    assert_eq!(y.len(), m, "y has wrong length");
    assert_eq!(z.len(), n, "z has wrong length");
    let mut ax = vec![0.0; m];
    program.a.mul_vec(x, &mut ax);
    for i in 0..m {
        ax[i] -= program.b[i];
    }
    let mut aty = vec![0.0; n];
    program.a.tmul_vec(y, &mut aty);
    for j in 0..n {
        aty[j] += z[j] - program.c[j];
    }
    let pcost = sparse::dot(&program.c, x);
    let dcost = sparse::dot(&program.b, y);
    Residuals {
        primal: sparse::norm2(&ax) / (1.0 + sparse::norm2(&program.b)),
        dual: sparse::norm2(&aty) / (1.0 + sparse::norm2(&program.c)),
        gap: (pcost - dcost).abs() / (1.0 + pcost.abs() + dcost.abs()),
    }
}

/// Largest violation of `v ∈ K` (0 when inside).
pub fn cone_violation(cones: &[Cone], v: &[f64]) -> f64 {
    let segs = cones::segments(cones);
    (-cones::cone_margin(&segs, v)).max(0.0)
}

/// Largest violation of `v ∈ K*`; free blocks must vanish.
pub fn dual_cone_violation(cones: &[Cone], v: &[f64]) -> f64 {
    let segs = cones::segments(cones);
    let mut worst = (-cones::cone_margin(&segs, v)).max(0.0);
    for s in &segs {
        if let Cone::Free(_) = s.cone {
            for &x in &v[s.range()] {
                worst = worst.max(x.abs());
            }
        }
    }
    worst
}
