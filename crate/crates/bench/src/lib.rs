//! Fixtures shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use platelimit::benchmarks::{johansen, quarter_square, Support};
use platelimit::selftest::random_certified_socp;
use platelimit::{assemble, AssembledProblem, CellPattern, ConicProgram, ElementFamily, ElementSpace, LoadSpec};

/// Upper triangle of the 5-point Laplacian on a `k × k` grid, shifted to be
/// positive definite, in CSC form `(colptr, rowval, values)`.
pub fn grid_laplacian(k: usize) -> (usize, Vec<usize>, Vec<usize>, Vec<f64>) {
    let n = k * k;
    let mut colptr = vec![0];
    let mut rowval = Vec::new();
    let mut values = Vec::new();
    for j in 0..n {
        let (r, c) = (j / k, j % k);
        if r > 0 {
            rowval.push(j - k);
            values.push(-1.0);
        }
        if c > 0 {
            rowval.push(j - 1);
            values.push(-1.0);
        }
        rowval.push(j);
        values.push(4.01);
        colptr.push(rowval.len());
    }
    (n, colptr, rowval, values)
}

/// Random SOCP with a known optimum and about `n` columns.
pub fn random_socp(seed: u64, n: usize) -> ConicProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_certified_socp(&mut rng, n).program
}

/// Assembled simply supported quarter square with `n` cells per side.
pub fn quarter_problem(family: ElementFamily, n: usize) -> AssembledProblem {
    let (mesh, bcs) = quarter_square(Support::Simple, n, CellPattern::Crossed);
    let space = ElementSpace::new(family, &mesh);
    assemble(&space, &johansen(1.0), &LoadSpec::UniformPressure(1.0), &bcs).expect("benchmark assembles")
}
