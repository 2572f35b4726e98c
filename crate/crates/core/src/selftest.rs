//! Oracle suites shared by the `selftest` command and the acceptance tests.
//!
//! Every suite is deterministic for a given seed.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conic::{self, Cone, ConicProgram, CscMatrix, Settings, Status};
use crate::fem::{interpolation_errors, Analytic, ElementFamily};
use crate::mesh::{generate_rect_mesh, CellPattern, Point};
use crate::yield_criteria::{
    coercivity_bounds, emit_cone_block, max_contraction, oracle_moments, pi_eval, StrengthField, Sym2, YieldCriterion,
};

/// Number of random curvatures per criterion in the support-function suites.
pub const PI_SAMPLES: usize = 1000;
/// Boundary samples of the brute-force oracle.
pub const ORACLE_RESOLUTION: usize = 100_000;
/// Cells per side of the interpolation-rate meshes.
pub const RATE_LEVELS: [usize; 4] = [4, 8, 16, 32];

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub passed: usize,
    pub total: usize,
    /// One line per failed case.
    pub failures: Vec<String>,
    /// Diagnostic lines (measured bounds, worst errors).
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            passed: 0,
            total: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, failure: impl FnOnce() -> String) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failures.push(failure());
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.total > 0
    }
}

/// A conic program with a known optimal objective.
#[derive(Debug, Clone)]
pub struct CertifiedInstance {
    pub program: ConicProgram,
    pub optimum: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

/// Builds a random program whose optimum is known by construction: a
/// complementary pair `(x*, z*)` and a dual `y*` are sampled first, then
/// `b = A x*` and `c = Aᵀ y* + z*`.
pub fn random_certified_socp(rng: &mut impl Rng, n_target: usize) -> CertifiedInstance {
    let mut cones = Vec::new();
    let mut n = 0;
    while n < n_target {
        let left = n_target - n;
        let cone = match rng.gen_range(0..4) {
            0 => Cone::Free(rng.gen_range(1..=3).min(left)),
            1 => Cone::NonNeg(rng.gen_range(1..=6).min(left)),
            _ if left >= 2 => Cone::Soc(rng.gen_range(2..=6).min(left)),
            _ => Cone::NonNeg(left),
        };
        n += cone.dim();
        cones.push(cone);
    }
    let n_free: usize = cones.iter().map(|c| if let Cone::Free(d) = c { *d } else { 0 }).sum();
    // Enough rows to pin the free block, fewer than columns.
    let m = (n / 2).max(n_free + 1).min(n);

    let mut x = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut off = 0;
    for cone in &cones {
        let d = cone.dim();
        match cone {
            Cone::Free(_) => {
                for v in &mut x[off..off + d] {
                    *v = rng.gen_range(-1.0..1.0);
                }
            }
            Cone::NonNeg(_) => {
                for k in off..off + d {
                    if rng.gen_bool(0.5) {
                        x[k] = rng.gen_range(0.1..2.0);
                    } else {
                        z[k] = rng.gen_range(0.1..2.0);
                    }
                }
            }
            Cone::Soc(_) => {
                // Unit direction for the tail.
                let mut u: Vec<f64>;
                loop {
                    u = (1..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm > 0.1 {
                        u.iter_mut().for_each(|v| *v /= norm);
                        break;
                    }
                }
                match rng.gen_range(0..3) {
                    // Both on the boundary, on opposite rays.
                    0 => {
                        let (a, b) = (rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0));
                        x[off] = a;
                        z[off] = b;
                        for k in 1..d {
                            x[off + k] = a * u[k - 1];
                            z[off + k] = -b * u[k - 1];
                        }
                    }
                    1 => {
                        x[off] = rng.gen_range(1.0..2.0);
                        for k in 1..d {
                            x[off + k] = 0.5 * u[k - 1];
                        }
                    }
                    _ => {
                        z[off] = rng.gen_range(1.0..2.0);
                        for k in 1..d {
                            z[off + k] = 0.5 * u[k - 1];
                        }
                    }
                }
            }
        }
        off += d;
    }

    // Sparse A with a guaranteed entry in every row and every free column.
    let mut trip = Vec::new();
    for i in 0..m {
        trip.push((i, rng.gen_range(0..n), rng.gen_range(-1.0..1.0)));
        trip.push((i, i * n / m, 1.0 + rng.gen_range(0.0..1.0)));
    }
    for j in 0..n {
        for _ in 0..2 {
            trip.push((rng.gen_range(0..m), j, rng.gen_range(-1.0..1.0)));
        }
    }
    let a = CscMatrix::from_triplets(m, n, &trip);
    let y: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut b = vec![0.0; m];
    a.mul_vec(&x, &mut b);
    let mut c = vec![0.0; n];
    a.tmul_vec(&y, &mut c);
    for j in 0..n {
        c[j] += z[j];
    }
    let optimum = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    CertifiedInstance {
        program: ConicProgram::new(a, b, c, cones).expect("generated program is valid"),
        optimum,
        x,
        y,
        z,
    }
}

/// Random certified SOCPs with sizes spread up to `max_n`.
pub fn socp_suite(seed: u64, count: usize, max_n: usize) -> SuiteReport {
    let mut report = SuiteReport::new("socp random instances");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let settings = Settings::default();
    let mut worst: f64 = 0.0;
    for k in 0..count {
        let n = 5 + (max_n - 5) * (k + 1) / count;
        let inst = random_certified_socp(&mut rng, n);
        let sol = conic::solve(&inst.program, &settings);
        let err = (sol.primal_objective - inst.optimum).abs() / (1.0 + inst.optimum.abs());
        worst = worst.max(if err.is_finite() { err } else { f64::INFINITY });
        report.record(sol.status == Status::Optimal && err <= 1e-6, || {
            format!(
                "instance {k} (n = {n}): status {}, relative error {err:.3e}",
                sol.status
            )
        });
    }
    report.notes.push(format!("worst relative objective error {worst:.3e}"));
    report
}

/// The criteria exercised when no configuration is given.
pub fn default_criteria() -> Vec<YieldCriterion> {
    vec![
        YieldCriterion::VonMises(StrengthField::Constant(1.0)),
        YieldCriterion::Tresca(StrengthField::Constant(1.0)),
        YieldCriterion::Johansen {
            positive: StrengthField::Constant(2.0),
            negative: StrengthField::Constant(1.0),
        },
    ]
}

/// Standard normal curvature components.
fn random_curvature(rng: &mut impl Rng) -> Sym2 {
    let mut normal = || {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        let v: f64 = rng.gen::<f64>();
        (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
    };
    [normal(), normal(), normal()]
}

const ORIGIN: Point = [0.0, 0.0];

/// Closed-form support functions against the sampled strength set, with
/// the measured coercivity bounds of each criterion as notes.
pub fn pi_oracle_suite(seed: u64, criteria: &[YieldCriterion], count: usize, resolution: usize) -> SuiteReport {
    let mut report = SuiteReport::new("support function oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for c in criteria {
        let moments = oracle_moments(c, ORIGIN, resolution);
        let mut worst: f64 = 0.0;
        for i in 0..count {
            let k = random_curvature(&mut rng);
            let exact = pi_eval(c, ORIGIN, k);
            let brute = max_contraction(&moments, k);
            let err = (exact - brute).abs() / exact;
            worst = worst.max(err);
            report.record(err <= 1e-3 && brute <= exact * (1.0 + 1e-12), || {
                format!("{} sample {i}: closed form {exact:.9}, oracle {brute:.9}", c.name())
            });
        }
        report
            .notes
            .push(format!("{}: worst relative gap {worst:.3e}", c.name()));
        match coercivity_bounds(c, &[ORIGIN]) {
            Ok((alpha, beta)) => {
                report.record(alpha > 0.0 && alpha <= beta, || {
                    format!("{}: bounds {alpha} {beta}", c.name())
                });
                report
                    .notes
                    .push(format!("{}: alpha = {alpha:.6}, beta = {beta:.6}", c.name()));
            }
            Err(e) => report.record(false, || format!("{}: {e}", c.name())),
        }
    }
    report
}

/// Minimizing the epigraph variable of each cone block at fixed curvature
/// reproduces the closed form.
pub fn cone_block_suite(seed: u64, criteria: &[YieldCriterion], count: usize) -> SuiteReport {
    let mut report = SuiteReport::new("cone block exactness");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let settings = Settings::default();
    for c in criteria {
        let block = match emit_cone_block(c, ORIGIN) {
            Ok(b) => b,
            Err(e) => {
                report.record(false, || format!("{}: {e}", c.name()));
                continue;
            }
        };
        let mut worst: f64 = 0.0;
        for i in 0..count {
            let k = random_curvature(&mut rng);
            let exact = pi_eval(c, ORIGIN, k);
            let sol = conic::solve(&block.fixed_program(&k), &settings);
            let err = (sol.primal_objective - exact).abs() / exact.max(1.0);
            worst = worst.max(if err.is_finite() { err } else { f64::INFINITY });
            report.record(sol.status == Status::Optimal && err <= 1e-6, || {
                format!(
                    "{} sample {i}: status {}, block {:.9}, closed form {exact:.9}",
                    c.name(),
                    sol.status,
                    sol.primal_objective
                )
            });
        }
        report
            .notes
            .push(format!("{}: worst relative error {worst:.3e}", c.name()));
    }
    report
}

/// Least-squares slope of `log e` against `log h`.
pub fn log_log_slope(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let lx: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Measured interpolation slopes `(W^{1,1}, Hessian TV)` of
/// `sin(πx) sin(πy)` on the unit square.
pub fn interpolation_slopes(family: ElementFamily, levels: &[usize]) -> (f64, f64) {
    let u = Analytic {
        value: |p: Point| (PI * p[0]).sin() * (PI * p[1]).sin(),
        gradient: |p: Point| {
            [
                PI * (PI * p[0]).cos() * (PI * p[1]).sin(),
                PI * (PI * p[0]).sin() * (PI * p[1]).cos(),
            ]
        },
        hessian: |p: Point| {
            let s = (PI * p[0]).sin() * (PI * p[1]).sin();
            [
                -PI * PI * s,
                -PI * PI * s,
                PI * PI * (PI * p[0]).cos() * (PI * p[1]).cos(),
            ]
        },
    };
    let mut h = Vec::new();
    let mut w = Vec::new();
    let mut t = Vec::new();
    for &n in levels {
        let mesh = generate_rect_mesh(1.0, 1.0, n, n, CellPattern::Diag).expect("valid grid");
        let (a, b) = interpolation_errors(family, &mesh, &u);
        h.push(1.0 / n as f64);
        w.push(a);
        t.push(b);
    }
    (log_log_slope(&h, &w), log_log_slope(&h, &t))
}

pub fn interpolation_rate_suite() -> SuiteReport {
    let mut report = SuiteReport::new("interpolation rates");
    for family in [ElementFamily::LagrangeP2, ElementFamily::HermiteP3] {
        let (sw, st) = interpolation_slopes(family, &RATE_LEVELS);
        report.record(sw >= 1.9, || format!("{family}: W11 slope {sw:.3} < 1.9"));
        report.record(st >= 0.9, || format!("{family}: Hessian TV slope {st:.3} < 0.9"));
        report
            .notes
            .push(format!("{family}: W11 slope {sw:.3}, Hessian TV slope {st:.3}"));
    }
    report
}

/// Every suite, in a fixed order.
pub fn run_all(seed: u64, criteria: &[YieldCriterion]) -> Vec<SuiteReport> {
    vec![
        pi_oracle_suite(seed, criteria, PI_SAMPLES, ORACLE_RESOLUTION),
        cone_block_suite(seed.wrapping_add(1), criteria, PI_SAMPLES),
        interpolation_rate_suite(),
        socp_suite(seed.wrapping_add(2), 100, 500),
    ]
}
