//! Kinematic upper-bound limit analysis of thin plates in bending.
//!
//! A plate mechanism `u` is discretized with P2 Lagrange or reduced P3
//! Hermite triangles. The collapse multiplier is the minimum over `ℓᵀu = 1`
//! of the bulk dissipation `∫ π(x, ∇²u)` plus the line dissipation of slope
//! jumps across edges, which [`assemble`] writes as a second-order cone
//! program and [`conic`] solves with a homogeneous self-dual interior-point
//! method.
//!
//! ```no_run
//! use platelimit::benchmarks::{johansen, quarter_square, Support};
//! use platelimit::{solve_limit_analysis, CellPattern, ElementFamily, LoadSpec, Settings};
//!
//! let (mesh, bcs) = quarter_square(Support::Simple, 10, CellPattern::Crossed);
//! let (_, result) = solve_limit_analysis(
//!     &mesh,
//!     ElementFamily::LagrangeP2,
//!     &johansen(1.0),
//!     &LoadSpec::UniformPressure(1.0),
//!     &bcs,
//!     &Settings::default(),
//! )
//! .unwrap();
//! assert!((result.lambda - 24.0).abs() < 1e-6);
//! ```

// Numerical kernels index several arrays in lockstep.
#![allow(clippy::needless_range_loop)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assemble;
pub mod benchmarks;
pub mod conic;
pub mod expr;
pub mod fem;
pub mod mesh;
pub mod selftest;
pub mod yield_criteria;

pub use assemble::{
    assemble, solve_limit_analysis, AssembleError, AssembledProblem, LimitAnalysisResult, LoadSpec, Rigor,
};
pub use conic::{ConicProgram, ConicSolution, Residuals, Settings, Status};
pub use expr::Expr;
pub use fem::{BcKind, BoundaryConditions, ElementFamily, ElementSpace};
pub use mesh::{generate_rect_mesh, CellPattern, Mesh, MeshError, Point};
pub use yield_criteria::{StrengthField, YieldCriterion};

/// Version of this crate, recorded in result files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
