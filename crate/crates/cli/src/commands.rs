//! The four verbs. Each returns a [`CliError`] that maps to an exit code.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use platelimit::conic::dump::write_dump;
use platelimit::selftest::{default_criteria, run_all};
use platelimit::{assemble, AssembleError, AssembledProblem, ElementSpace, LimitAnalysisResult, Mesh};

use crate::config::{ConfigError, RunConfig};
use crate::output::{convergence_csv, convergence_svg, vtk, ConvergenceRow};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solve(#[from] AssembleError),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Solve(_) | CliError::Failed(_) => 1,
            CliError::Config(_) | CliError::Write { .. } | CliError::Usage(_) => 2,
        }
    }
}

/// Where result files go.
pub struct OutputDir(pub PathBuf);

impl OutputDir {
    pub fn create(dir: &Path) -> Result<OutputDir, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(OutputDir(dir.to_path_buf()))
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        self.0.join(path)
    }

    fn write(&self, path: &Path, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.resolve(path);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| CliError::Write {
                path: parent.to_path_buf(),
                source,
            })?;
        }
        fs::write(&path, contents).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}

#[derive(Serialize)]
struct Versions {
    platelimit: &'static str,
    cli: &'static str,
}

#[derive(Serialize)]
struct Sizes {
    vertices: usize,
    triangles: usize,
    edges: usize,
    total_dofs: usize,
    free_dofs: usize,
    curvature_points: usize,
    jump_points: usize,
    conic_rows: usize,
    conic_cols: usize,
    cones: usize,
    nonzeros: usize,
}

#[derive(Serialize)]
struct ResidualRecord {
    primal: f64,
    dual: f64,
    gap: f64,
}

/// The JSON record of one solve.
#[derive(Serialize)]
struct SolveRecord {
    versions: Versions,
    status: String,
    /// `λ · L · a² / M0`.
    lambda: Option<f64>,
    lambda_raw: Option<f64>,
    relative_error: Option<f64>,
    reduced_accuracy: bool,
    iterations: usize,
    residuals: ResidualRecord,
    consistency_gap: Option<f64>,
    normalization_residual: Option<f64>,
    rigor: String,
    element: String,
    criterion: String,
    sizes: Sizes,
    config: RunConfig,
}

fn sizes(mesh: &Mesh, problem: &AssembledProblem) -> Sizes {
    let s = problem.size;
    Sizes {
        vertices: mesh.vertices.len(),
        triangles: s.triangles,
        edges: s.edges,
        total_dofs: s.total_dofs,
        free_dofs: s.free_dofs,
        curvature_points: s.curvature_points,
        jump_points: s.jump_points,
        conic_rows: s.rows,
        conic_cols: s.cols,
        cones: s.cones,
        nonzeros: s.nnz,
    }
}

fn relative_error(config: &RunConfig, lambda: f64) -> Option<f64> {
    config.reference_lambda.map(|r| (lambda - r) / r)
}

fn assemble_config(config: &RunConfig, mesh: &Mesh) -> Result<AssembledProblem, CliError> {
    let space = ElementSpace::new(config.family(), mesh);
    Ok(assemble(
        &space,
        &config.criterion()?,
        &config.load_spec()?,
        &config.boundary_conditions(),
    )?)
}

pub fn solve(config: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let mesh = config.mesh()?;
    let problem = assemble_config(config, &mesh)?;
    let outcome = problem.solve(&config.solver.settings());
    let base = SolveRecord {
        versions: Versions {
            platelimit: platelimit::VERSION,
            cli: env!("CARGO_PKG_VERSION"),
        },
        status: String::new(),
        lambda: None,
        lambda_raw: None,
        relative_error: None,
        reduced_accuracy: false,
        iterations: 0,
        residuals: ResidualRecord {
            primal: f64::NAN,
            dual: f64::NAN,
            gap: f64::NAN,
        },
        consistency_gap: None,
        normalization_residual: None,
        rigor: problem.metadata.rigor.to_string(),
        element: config.family().to_string(),
        criterion: problem.metadata.criterion.to_string(),
        sizes: sizes(&mesh, &problem),
        config: config.clone(),
    };
    let record = match &outcome {
        Ok(r) => {
            let lambda = config.normalized(r.lambda);
            SolveRecord {
                status: r.status.to_string(),
                lambda: Some(lambda),
                lambda_raw: Some(r.lambda),
                relative_error: relative_error(config, lambda),
                reduced_accuracy: r.reduced_accuracy,
                iterations: r.iterations,
                residuals: ResidualRecord {
                    primal: r.residuals.primal,
                    dual: r.residuals.dual,
                    gap: r.residuals.gap,
                },
                consistency_gap: Some(r.consistency_gap),
                normalization_residual: Some(r.normalization_residual),
                ..base
            }
        }
        Err(AssembleError::NotOptimal {
            status,
            residuals,
            iterations,
        }) => SolveRecord {
            status: status.to_string(),
            iterations: *iterations,
            residuals: ResidualRecord {
                primal: residuals.primal,
                dual: residuals.dual,
                gap: residuals.gap,
            },
            ..base
        },
        Err(e) => return Err(CliError::Solve(e.clone())),
    };
    let json = serde_json::to_string_pretty(&record).expect("record serializes") + "\n";
    if let Some(path) = &config.outputs.json {
        out.write(path, &json)?;
    }
    print!("{json}");

    let result: &LimitAnalysisResult = match &outcome {
        Ok(r) => r,
        Err(e) => return Err(CliError::Solve(e.clone())),
    };
    if let Some(path) = &config.outputs.vtk {
        let space = ElementSpace::new(config.family(), &mesh);
        out.write(path, &vtk(&mesh, &space, result))?;
    }
    Ok(())
}

/// Mesh refinement schedule of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub enum Levels {
    /// The configured mesh and `n − 1` successive uniform refinements.
    Count(usize),
    /// Structured meshes with the given cell sizes, in units of the
    /// normalization length.
    Sizes(Vec<f64>),
}

struct Level {
    mesh: Mesh,
    h: f64,
}

fn levels(config: &RunConfig, schedule: &Levels) -> Result<Vec<Level>, CliError> {
    let length = config.normalization.length;
    let max_diameter = |m: &Mesh| (0..m.triangles.len()).map(|t| m.diameter(t)).fold(0.0, f64::max);
    match schedule {
        Levels::Count(n) if *n < 2 => Err(CliError::Usage(format!(
            "a convergence study needs at least 2 levels, got {n}"
        ))),
        Levels::Sizes(h) if h.len() < 2 => Err(CliError::Usage(format!(
            "a convergence study needs at least 2 levels, got {}",
            h.len()
        ))),
        Levels::Count(n) => {
            let mut out = Vec::with_capacity(*n);
            if config.is_rect() {
                let spec = config.mesh.as_ref().expect("validated");
                let (w, ht) = match config.domain {
                    crate::config::Domain::Rect { width, height } => (width, height),
                    _ => unreachable!(),
                };
                for k in 0..*n {
                    let (nx, ny) = (spec.nx << k, spec.ny << k);
                    out.push(Level {
                        mesh: config.rect_mesh(nx, ny)?,
                        h: (w / nx as f64).max(ht / ny as f64) / length,
                    });
                }
            } else {
                let mut mesh = config.mesh()?;
                for _ in 0..*n {
                    let next = mesh.refine_uniform();
                    let h = max_diameter(&mesh) / length;
                    out.push(Level { mesh, h });
                    mesh = next;
                }
            }
            Ok(out)
        }
        Levels::Sizes(sizes) => {
            let crate::config::Domain::Rect { width, height } = config.domain else {
                return Err(CliError::Usage(
                    "--h needs a rect domain; use --levels for mesh files".into(),
                ));
            };
            sizes
                .iter()
                .map(|&h| {
                    if !(h > 0.0 && h.is_finite()) {
                        return Err(CliError::Usage(format!("mesh sizes must be positive, got {h}")));
                    }
                    let cells = |side: f64| ((side / (h * length)).round() as usize).max(1);
                    let (nx, ny) = (cells(width), cells(height));
                    Ok(Level {
                        mesh: config.rect_mesh(nx, ny)?,
                        h: (width / nx as f64).max(height / ny as f64) / length,
                    })
                })
                .collect()
        }
    }
}

fn run_level(config: &RunConfig, index: usize, level: &Level, timings: bool) -> Result<ConvergenceRow, CliError> {
    let problem = assemble_config(config, &level.mesh)?;
    let start = Instant::now();
    let outcome = problem.solve(&config.solver.settings());
    let seconds = timings.then(|| start.elapsed().as_secs_f64());
    let mut row = ConvergenceRow {
        level: index,
        h: level.h,
        dofs: problem.size.free_dofs,
        lambda: None,
        relative_error: None,
        seconds,
        rigor: problem.metadata.rigor.to_string(),
        status: String::new(),
    };
    match outcome {
        Ok(r) => {
            let lambda = config.normalized(r.lambda);
            row.lambda = Some(lambda);
            row.relative_error = relative_error(config, lambda);
            row.status = r.status.to_string();
        }
        Err(AssembleError::NotOptimal { status, .. }) => row.status = status.to_string(),
        Err(e) => return Err(e.into()),
    }
    Ok(row)
}

pub fn convergence(
    config: &RunConfig,
    schedule: &Levels,
    threads: usize,
    timings: bool,
    out: &OutputDir,
) -> Result<(), CliError> {
    let levels = levels(config, schedule)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} threads: {e}")))?;
    let results: Vec<Result<ConvergenceRow, CliError>> = pool.install(|| {
        levels
            .par_iter()
            .enumerate()
            .map(|(i, level)| run_level(config, i, level, timings))
            .collect()
    });
    let mut rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| b.h.total_cmp(&a.h).then(a.level.cmp(&b.level)));

    let csv = convergence_csv(&rows).map_err(|e| CliError::Failed(format!("csv: {e}")))?;
    let csv_path = config.outputs.csv.clone().unwrap_or_else(|| "convergence.csv".into());
    out.write(&csv_path, &csv)?;
    print!("{csv}");
    if let Some(svg) = config.reference_lambda.and_then(|_| convergence_svg(&rows)) {
        let svg_path = config.outputs.svg.clone().unwrap_or_else(|| "convergence.svg".into());
        out.write(&svg_path, &svg)?;
    }

    let failed: Vec<usize> = rows.iter().filter(|r| r.lambda.is_none()).map(|r| r.level).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "levels {failed:?} did not reach an optimal solution"
        )))
    }
}

pub fn selftest(seed: u64, config: Option<&RunConfig>) -> Result<(), CliError> {
    let criteria = match config {
        Some(c) => vec![c.criterion()?],
        None => default_criteria(),
    };
    let reports = run_all(seed, &criteria);
    let mut failed = 0;
    for r in &reports {
        let verdict = if r.ok() { "PASS" } else { "FAIL" };
        println!("{verdict} {}: {}/{}", r.name, r.passed, r.total);
        for note in &r.notes {
            println!("    {note}");
        }
        for f in &r.failures {
            println!("    failed: {f}");
        }
        if !r.ok() {
            failed += 1;
        }
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{failed} of {} suites failed", reports.len())))
    }
}

pub fn dump_conic(config: &RunConfig, target: &Path) -> Result<(), CliError> {
    let mesh = config.mesh()?;
    let problem = assemble_config(config, &mesh)?;
    write_dump(&problem.program, target).map_err(|e| CliError::Write {
        path: target.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    })?;
    let s = problem.size;
    println!(
        "wrote {}: {} rows, {} columns, {} cones, {} nonzeros",
        target.display(),
        s.rows,
        s.cols,
        s.cones,
        s.nnz
    );
    Ok(())
}
