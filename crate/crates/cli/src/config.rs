//! Run configuration: a JSON document with a fixed schema.
//!
//! Unknown keys are rejected everywhere. Parse errors carry the JSON
//! pointer of the offending value.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use platelimit::fem::BcKind;
use platelimit::mesh::{import_mesh, MeshFormat};
use platelimit::{
    generate_rect_mesh, BoundaryConditions, CellPattern, ElementFamily, Expr, LoadSpec, Mesh, Settings, StrengthField,
    YieldCriterion,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("invalid config at {pointer}: {message}")]
    Value { pointer: &'static str, message: String },
    #[error("cannot load mesh {path}: {message}")]
    Mesh { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: Domain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quarter_symmetry: Option<QuarterSymmetry>,
    pub element: Element,
    pub criterion: CriterionSpec,
    pub bcs: Vec<BcEntry>,
    pub load: LoadConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<MeshSpec>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_lambda: Option<f64>,
    #[serde(default)]
    pub normalization: Normalization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Domain {
    Rect { width: f64, height: f64 },
    MeshFile { path: PathBuf, format: MeshFileFormat },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshFileFormat {
    TriangleNodeEle,
    Msh2Ascii,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuarterSymmetry {
    pub enabled: bool,
    #[serde(default = "default_symmetry_sides")]
    pub sides: Vec<String>,
}

fn default_symmetry_sides() -> Vec<String> {
    vec!["right".into(), "top".into()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Element {
    P2Lagrange,
    P3Hermite,
}

impl From<Element> for ElementFamily {
    fn from(e: Element) -> Self {
        match e {
            Element::P2Lagrange => ElementFamily::LagrangeP2,
            Element::P3Hermite => ElementFamily::HermiteP3,
        }
    }
}

/// A strength value: a number or an expression in `x1`, `x2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Strength {
    Constant(f64),
    Expression(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CriterionSpec {
    VonMises { m0: Strength },
    Tresca { m0: Strength },
    Johansen { positive: Strength, negative: Strength },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcEntry {
    pub region: String,
    pub kind: BcKindConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcKindConfig {
    Dirichlet,
    Clamped,
    Free,
    Symmetry,
}

impl From<BcKindConfig> for BcKind {
    fn from(k: BcKindConfig) -> Self {
        match k {
            BcKindConfig::Dirichlet => BcKind::Dirichlet,
            BcKindConfig::Clamped => BcKind::Clamped,
            BcKindConfig::Free => BcKind::Free,
            BcKindConfig::Symmetry => BcKind::Symmetry,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadConfig {
    Uniform { value: f64 },
    Density { expression: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub nx: usize,
    pub ny: usize,
    pub pattern: PatternConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternConfig {
    Diag,
    Crossed,
}

impl From<PatternConfig> for CellPattern {
    fn from(p: PatternConfig) -> Self {
        match p {
            PatternConfig::Diag => CellPattern::Diag,
            PatternConfig::Crossed => CellPattern::Crossed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tol_feas: f64,
    pub tol_gap: f64,
    pub tol_infeas: f64,
    pub max_iter: usize,
    pub static_reg: f64,
    pub equilibration_passes: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = Settings::default();
        SolverConfig {
            tol_feas: s.tol_feas,
            tol_gap: s.tol_gap,
            tol_infeas: s.tol_infeas,
            max_iter: s.max_iter,
            static_reg: s.static_reg,
            equilibration_passes: s.equilibration_passes,
        }
    }
}

impl SolverConfig {
    pub fn settings(&self) -> Settings {
        Settings {
            tol_feas: self.tol_feas,
            tol_gap: self.tol_gap,
            tol_infeas: self.tol_infeas,
            max_iter: self.max_iter,
            static_reg: self.static_reg,
            equilibration_passes: self.equilibration_passes,
        }
    }
}

/// Output paths, relative to the output directory unless absolute.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vtk: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
}

/// Units of the reported multiplier `λ · L · a² / M0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Normalization {
    /// Reference length `a`.
    pub length: f64,
    /// Reference strength `M0`.
    pub strength: f64,
    /// Reference load intensity `L`; the uniform load value when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub load: Option<f64>,
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization {
            length: 1.0,
            strength: 1.0,
            load: None,
        }
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = RunConfig::parse(&text)?;
        // Mesh files are located relative to the config file.
        if let Domain::MeshFile { path: mesh, .. } = &mut config.domain {
            if mesh.is_relative() {
                if let Some(dir) = path.parent() {
                    *mesh = dir.join(&*mesh);
                }
            }
        }
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Schema {
            pointer: json_pointer(e.path()),
            message: e.inner().to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    #[cfg(test)]
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |pointer, message: String| Err(ConfigError::Value { pointer, message });
        match &self.domain {
            Domain::Rect { width, height } => {
                if !(*width > 0.0 && *height > 0.0 && width.is_finite() && height.is_finite()) {
                    return bad(
                        "/domain/rect",
                        format!("sides must be positive, got {width} × {height}"),
                    );
                }
                match &self.mesh {
                    None => return bad("/mesh", "a rect domain needs mesh {nx, ny, pattern}".into()),
                    Some(m) if m.nx == 0 || m.ny == 0 => {
                        return bad(
                            "/mesh",
                            format!("cell counts must be positive, got {} × {}", m.nx, m.ny),
                        )
                    }
                    Some(_) => {}
                }
            }
            Domain::MeshFile { .. } => {}
        }
        if self.bcs.is_empty() {
            return bad("/bcs", "at least one boundary region is required".into());
        }
        if let Some(q) = &self.quarter_symmetry {
            if q.enabled && q.sides.is_empty() {
                return bad("/quarter_symmetry/sides", "no symmetry sides given".into());
            }
        }
        self.criterion()?;
        self.load_spec()?;
        if let LoadConfig::Uniform { value } = self.load {
            if !(value.is_finite() && value != 0.0) {
                return bad("/load/value", format!("load must be finite and nonzero, got {value}"));
            }
        }
        let n = &self.normalization;
        if !(n.length > 0.0 && n.strength > 0.0 && n.load.is_none_or(|l| l != 0.0 && l.is_finite())) {
            return bad(
                "/normalization",
                "reference length and strength must be positive, load nonzero".into(),
            );
        }
        if let Some(r) = self.reference_lambda {
            if !(r > 0.0 && r.is_finite()) {
                return bad("/reference_lambda", format!("must be positive, got {r}"));
            }
        }
        let s = &self.solver;
        if !(s.tol_feas > 0.0 && s.tol_gap > 0.0 && s.tol_infeas > 0.0 && s.static_reg > 0.0) {
            return bad("/solver", "tolerances and regularization must be positive".into());
        }
        Ok(())
    }

    pub fn family(&self) -> ElementFamily {
        self.element.into()
    }

    pub fn criterion(&self) -> Result<YieldCriterion, ConfigError> {
        let field = |s: &Strength, pointer: &'static str| -> Result<StrengthField, ConfigError> {
            match s {
                Strength::Constant(v) if *v > 0.0 && v.is_finite() => Ok(StrengthField::Constant(*v)),
                Strength::Constant(v) => Err(ConfigError::Value {
                    pointer,
                    message: format!("strength must be positive, got {v}"),
                }),
                Strength::Expression(src) => {
                    Expr::parse(src)
                        .map(StrengthField::Expression)
                        .map_err(|e| ConfigError::Value {
                            pointer,
                            message: e.to_string(),
                        })
                }
            }
        };
        Ok(match &self.criterion {
            CriterionSpec::VonMises { m0 } => YieldCriterion::VonMises(field(m0, "/criterion/m0")?),
            CriterionSpec::Tresca { m0 } => YieldCriterion::Tresca(field(m0, "/criterion/m0")?),
            CriterionSpec::Johansen { positive, negative } => YieldCriterion::Johansen {
                positive: field(positive, "/criterion/positive")?,
                negative: field(negative, "/criterion/negative")?,
            },
        })
    }

    pub fn load_spec(&self) -> Result<LoadSpec, ConfigError> {
        Ok(match &self.load {
            LoadConfig::Uniform { value } => LoadSpec::UniformPressure(*value),
            LoadConfig::Density { expression } => {
                LoadSpec::Density(Expr::parse(expression).map_err(|e| ConfigError::Value {
                    pointer: "/load/expression",
                    message: e.to_string(),
                })?)
            }
        })
    }

    pub fn boundary_conditions(&self) -> BoundaryConditions {
        let mut pairs: Vec<(String, BcKind)> = self.bcs.iter().map(|b| (b.region.clone(), b.kind.into())).collect();
        if let Some(q) = self.quarter_symmetry.as_ref().filter(|q| q.enabled) {
            pairs.retain(|(r, _)| !q.sides.contains(r));
            pairs.extend(q.sides.iter().map(|s| (s.clone(), BcKind::Symmetry)));
        }
        BoundaryConditions::new(pairs)
    }

    /// `λ · L · a² / M0` for a raw multiplier.
    pub fn normalized(&self, lambda: f64) -> f64 {
        let n = &self.normalization;
        let load = n.load.unwrap_or(match self.load {
            LoadConfig::Uniform { value } => value,
            LoadConfig::Density { .. } => 1.0,
        });
        lambda * load * n.length * n.length / n.strength
    }

    /// The configured mesh.
    pub fn mesh(&self) -> Result<Mesh, ConfigError> {
        match &self.domain {
            Domain::Rect { .. } => {
                let m = self.mesh.as_ref().expect("validated");
                self.rect_mesh(m.nx, m.ny)
            }
            Domain::MeshFile { path, format } => {
                let format = match format {
                    MeshFileFormat::TriangleNodeEle => MeshFormat::TriangleNodeEle,
                    MeshFileFormat::Msh2Ascii => MeshFormat::Msh2Ascii,
                };
                import_mesh(path, format).map_err(|e| ConfigError::Mesh {
                    path: path.clone(),
                    message: e.to_string(),
                })
            }
        }
    }

    /// Structured mesh of a rect domain with the configured pattern.
    pub fn rect_mesh(&self, nx: usize, ny: usize) -> Result<Mesh, ConfigError> {
        let (Domain::Rect { width, height }, Some(m)) = (&self.domain, &self.mesh) else {
            return Err(ConfigError::Value {
                pointer: "/domain",
                message: "structured meshes need a rect domain".into(),
            });
        };
        generate_rect_mesh(*width, *height, nx, ny, m.pattern.into()).map_err(|e| ConfigError::Value {
            pointer: "/mesh",
            message: e.to_string(),
        })
    }

    pub fn is_rect(&self) -> bool {
        matches!(self.domain, Domain::Rect { .. })
    }
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}
