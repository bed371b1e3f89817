//! Scenario files: TOML or JSON, chosen by extension.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::checks::{self, Module};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("unsupported config extension {0:?} (use .toml or .json)")]
    Extension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no scenarios")]
    Empty,
    #[error("duplicate scenario name {0:?}")]
    Duplicate(String),
    #[error("scenario {scenario:?}: {message}")]
    Schema { scenario: String, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    Algebra,
    Coupling,
    Core,
    Qm,
    Moyal,
    Fock,
    Wedge,
    All,
}

impl Selector {
    pub fn modules(self) -> Vec<Module> {
        match self {
            Selector::Algebra => vec![Module::Algebra],
            Selector::Coupling => vec![Module::Coupling],
            Selector::Core => vec![Module::Core],
            Selector::Qm => vec![Module::Qm],
            Selector::Moyal => vec![Module::Moyal],
            Selector::Fock => vec![Module::Fock],
            Selector::Wedge => vec![Module::Wedge],
            Selector::All => Module::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    /// Real coefficients `Y^α`, one per generator.
    Vector,
    /// `[y1, y2, y3, y4]` for the two-by-two diagonal family.
    Family,
    /// Complex coefficient matrices, given as `re` and optional `im`.
    Matrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub kind: CouplingKind,
    #[serde(default)]
    pub y: Vec<f64>,
    #[serde(default)]
    pub re: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub im: Vec<Vec<Vec<f64>>>,
    pub scale: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaConfig {
    pub lambda: Option<f64>,
    #[serde(default)]
    pub eta: f64,
    pub matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Configuration-space dimension; only 2 is supported.
    pub n: usize,
    /// Points per axis.
    pub points: usize,
    pub half_length: f64,
    /// Width of the Gaussian test vectors.
    pub width: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 2, points: 64, half_length: 10.0, width: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldPreset {
    Identity,
    Quadratic,
}

/// Either a preset or an explicit value/Jacobian pair in `x1..xn`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub preset: Option<FieldPreset>,
    #[serde(default = "default_quadratic")]
    pub coefficient: f64,
    #[serde(default)]
    pub value: Vec<String>,
    #[serde(default)]
    pub jacobian: Vec<Vec<String>>,
}

fn default_quadratic() -> f64 {
    0.1
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self { preset: Some(FieldPreset::Identity), coefficient: default_quadratic(), value: vec![], jacobian: vec![] }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FockConfig {
    pub mass: f64,
    pub modes: Vec<f64>,
    pub ncut: usize,
    pub sigma: f64,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self { mass: 1.0, modes: vec![-1.0, -0.3, 0.4, 1.2], ncut: 3, sigma: 1.0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpConfig {
    pub center: [f64; 2],
    pub scale: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WedgeConfig {
    pub mass: f64,
    /// Bump supported in the right wedge.
    pub right: BumpConfig,
    /// Bump supported in the left wedge.
    pub left: BumpConfig,
    pub beta: f64,
    pub theta_max: f64,
    pub points: usize,
    /// Forward-cone sample points; the origin is always added.
    pub z_samples: Option<Vec<[f64; 2]>>,
}

impl Default for WedgeConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            right: BumpConfig { center: [0.0, 1.2], scale: 1.0 },
            left: BumpConfig { center: [0.0, -1.2], scale: 1.0 },
            beta: 0.3,
            theta_max: 8.0,
            points: 2000,
            z_samples: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoreConfig {
    /// Randomized instances per identity.
    pub instances: usize,
    pub max_n: usize,
    pub epsilons: Vec<f64>,
    pub hermite_nodes: usize,
    /// `Θ₁₂` of the strong-limit instance.
    pub strong_limit_theta: f64,
}

impl Default for CoreConfig {
    fn default() -> Self {
        Self { instances: 100, max_n: 8, epsilons: vec![0.4, 0.2, 0.1, 0.05, 0.02, 0.01], hermite_nodes: 96, strong_limit_theta: 0.8 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub module: Selector,
    pub seed: Option<u64>,
    #[serde(default = "default_m")]
    pub m: usize,
    pub coupling: Option<CouplingConfig>,
    pub theta: Option<ThetaConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default)]
    pub fock: FockConfig,
    #[serde(default)]
    pub wedge: WedgeConfig,
    #[serde(default)]
    pub core: CoreConfig,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

fn default_m() -> usize {
    2
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    scenario: Vec<ScenarioConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Ok(Format::Toml),
            Some("json") => Ok(Format::Json),
            other => Err(ConfigError::Extension(other.unwrap_or("").to_string())),
        }
    }
}

pub fn load_config(path: &Path, seed_override: Option<u64>) -> Result<Vec<ScenarioConfig>, ConfigError> {
    let format = Format::from_path(path)?;
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse_config(&text, format, seed_override)
}

pub fn parse_config(text: &str, format: Format, seed_override: Option<u64>) -> Result<Vec<ScenarioConfig>, ConfigError> {
    let file: ConfigFile = match format {
        Format::Toml => toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?,
        Format::Json => serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?,
    };
    let mut scenarios = file.scenario;
    if scenarios.is_empty() {
        return Err(ConfigError::Empty);
    }
    let mut seen = BTreeSet::new();
    for sc in &mut scenarios {
        if !seen.insert(sc.name.clone()) {
            return Err(ConfigError::Duplicate(sc.name.clone()));
        }
        if let Some(s) = seed_override {
            sc.seed = Some(s);
        }
        validate(sc).map_err(|message| ConfigError::Schema { scenario: sc.name.clone(), message })?;
    }
    Ok(scenarios)
}

fn validate(sc: &ScenarioConfig) -> Result<(), String> {
    if sc.name.trim().is_empty() {
        return Err("empty name".into());
    }
    let modules = sc.module.modules();
    if sc.m < 2 {
        return Err(format!("m = {} but at least 2 is required", sc.m));
    }
    if sc.seed.is_none() && modules.iter().any(|m| m.randomized()) {
        return Err("missing seed (required for randomized checks)".into());
    }
    for m in &modules {
        if m.needs_coupling() && sc.coupling.is_none() {
            return Err(format!("module {} requires [coupling]", m.name()));
        }
        if m.needs_theta() && sc.theta.as_ref().is_none_or(|t| t.lambda.is_none() && t.matrix.is_none()) {
            return Err(format!("module {} requires [theta] with lambda or matrix", m.name()));
        }
    }
    if let Some(cp) = &sc.coupling {
        validate_coupling(cp, sc.m)?;
    }
    if let Some(t) = &sc.theta {
        if let Some(mat) = &t.matrix {
            if mat.len() != 2 || mat.iter().any(|r| r.len() != 2) {
                return Err("theta.matrix must be 2 × 2".into());
            }
            if modules.contains(&Module::Wedge) {
                return Err("wedge scenarios take theta.lambda and theta.eta, not a matrix".into());
            }
        }
    }
    if modules.iter().any(|m| matches!(m, Module::Qm | Module::Moyal)) {
        let g = &sc.grid;
        if g.n != 2 {
            return Err(format!("grid.n = {} but only n = 2 is supported", g.n));
        }
        if g.points < 8 || g.points % 2 != 0 {
            return Err("grid.points must be even and at least 8".into());
        }
        if !(g.half_length > 0.0) || !(g.width > 0.0) {
            return Err("grid.half_length and grid.width must be positive".into());
        }
        let f = &sc.field;
        match (f.preset, f.value.is_empty()) {
            (Some(_), true) => {}
            (None, false) => {
                if f.value.len() != 2 || f.jacobian.len() != 2 || f.jacobian.iter().any(|r| r.len() != 2) {
                    return Err("field needs two value expressions and a 2 × 2 jacobian".into());
                }
            }
            _ => return Err("field takes either a preset or value/jacobian expressions".into()),
        }
    }
    if modules.contains(&Module::Fock) {
        let f = &sc.fock;
        if f.sigma != 1.0 && f.sigma != -1.0 {
            return Err("fock.sigma must be 1 or -1".into());
        }
        if f.ncut < 2 {
            return Err("fock.ncut must be at least 2".into());
        }
    }
    if modules.contains(&Module::Wedge) {
        let w = &sc.wedge;
        if w.points < 2 || !(w.theta_max > 0.0) || !(w.mass > 0.0) {
            return Err("wedge needs points ≥ 2, theta_max > 0 and mass > 0".into());
        }
    }
    if modules.contains(&Module::Core) {
        let c = &sc.core;
        if c.instances == 0 || c.max_n < 2 || c.epsilons.is_empty() {
            return Err("core needs instances ≥ 1, max_n ≥ 2 and at least one epsilon".into());
        }
    }
    for (id, tol) in &sc.tolerances {
        let spec = checks::find(id).ok_or_else(|| format!("tolerance override for unknown check {id:?}"))?;
        if !modules.contains(&spec.module) {
            return Err(format!("tolerance override {id:?} does not belong to the selected module"));
        }
        if !tol.is_finite() {
            return Err(format!("tolerance override {id:?} is not finite"));
        }
    }
    Ok(())
}

fn validate_coupling(cp: &CouplingConfig, m: usize) -> Result<(), String> {
    let dim = m * m - 1;
    match cp.kind {
        CouplingKind::Vector if cp.y.len() != dim => Err(format!("coupling.y has {} entries, su({m}) needs {dim}", cp.y.len())),
        CouplingKind::Family if m != 2 || cp.y.len() != 4 => Err("family coupling needs m = 2 and y = [y1, y2, y3, y4]".into()),
        CouplingKind::Matrix => {
            let shape_ok = |mats: &Vec<Vec<Vec<f64>>>| mats.len() == dim && mats.iter().all(|r| r.len() == m && r.iter().all(|row| row.len() == m));
            if !shape_ok(&cp.re) || (!cp.im.is_empty() && !shape_ok(&cp.im)) {
                Err(format!("matrix coupling needs {dim} coefficient matrices of size {m} × {m}"))
            } else {
                Ok(())
            }
        }
        _ => Ok(()),
    }
}
