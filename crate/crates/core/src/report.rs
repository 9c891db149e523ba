//! Run configuration, command orchestration and report emission.
//!
//! Configuration files are UTF-8 `key = value` lines; `#` starts a comment
//! and lists are comma-separated. See the README for the full grammar.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::SystemTime;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::diagrams::{self, EnumerationReport, OrderMode, Tiers, Verdict};
use crate::equations::{InvariantReport, InvariantThresholds};
use crate::massconds::{self, ExceptionalScanReport, MassConditionId};
use crate::model::{validate_masses, MassVector, PlanarConfig, ShapeParam, MAX_BODIES, MIN_BODIES};
use crate::solver::{self, MultistartReport, SolverOptions, SweepReport};

pub const TOOL: &str = "bclab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

/// Relative tolerance for placing a class on a principal axis.
const AXIS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid {field}: {message}")]
    Validation { field: &'static str, message: String },
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation { field, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Sweep,
    Diagrams,
    Masscond,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Sweep => "sweep",
            Command::Diagrams => "diagrams",
            Command::Masscond => "masscond",
            Command::Verify => "verify",
        }
    }

    fn needs_masses(self) -> bool {
        matches!(self, Command::Solve | Command::Sweep | Command::Masscond)
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "solve" => Ok(Command::Solve),
            "sweep" => Ok(Command::Sweep),
            "diagrams" => Ok(Command::Diagrams),
            "masscond" => Ok(Command::Masscond),
            "verify" => Ok(Command::Verify),
            other => Err(format!("unknown command '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagramModes {
    Equal,
    Nonequal,
    Both,
}

impl DiagramModes {
    fn modes(self) -> Vec<OrderMode> {
        match self {
            DiagramModes::Equal => vec![OrderMode::EqualOrder],
            DiagramModes::Nonequal => vec![OrderMode::NonEqualOrder],
            DiagramModes::Both => vec![OrderMode::EqualOrder, OrderMode::NonEqualOrder],
        }
    }
}

/// `lo, hi, steps`: `steps` evenly spaced points including both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaGrid {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl EtaGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub masses: Option<Vec<f64>>,
    pub eta: Option<f64>,
    pub eta_grid: Option<EtaGrid>,
    #[serde(flatten)]
    pub solver: SolverOptions,
    pub output_dir: PathBuf,
    pub formats: Vec<Format>,
    pub order_mode: DiagramModes,
    pub include_v3: bool,
    pub input: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Solve,
            masses: None,
            eta: None,
            eta_grid: None,
            solver: SolverOptions::default(),
            output_dir: PathBuf::from("bclab-out"),
            formats: vec![Format::Json],
            order_mode: DiagramModes::Both,
            include_v3: false,
            input: None,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    pub out: Option<PathBuf>,
    pub include_v3: bool,
}

fn list(v: &str) -> Vec<&str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn parse_num<T: FromStr>(v: &str, line: usize, key: &str) -> Result<T, ConfigError> {
    v.trim().parse().map_err(|_| ConfigError::Parse { line, message: format!("{key}: cannot parse '{v}'") })
}

fn parse_bool(v: &str, line: usize, key: &str) -> Result<bool, ConfigError> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::Parse { line, message: format!("{key}: expected true or false") }),
    }
}

/// Parse and validate a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(ConfigError::Parse { line, message: "expected 'key = value'".into() });
        };
        let key = k.trim().to_ascii_lowercase();
        let v = v.trim();
        if seen.contains(&key) {
            return Err(ConfigError::Parse { line, message: format!("duplicate key '{key}'") });
        }
        seen.push(key.clone());
        let perr = |message: String| ConfigError::Parse { line, message };
        match key.as_str() {
            "command" => cfg.command = v.parse().map_err(perr)?,
            "masses" => {
                cfg.masses = Some(list(v).iter().map(|s| parse_num(s, line, "masses")).collect::<Result<_, _>>()?)
            }
            "eta" => cfg.eta = Some(parse_num(v, line, "eta")?),
            "eta_grid" => {
                let parts = list(v);
                if parts.len() != 3 {
                    return Err(perr("eta_grid: expected 'lo, hi, steps'".into()));
                }
                cfg.eta_grid = Some(EtaGrid {
                    lo: parse_num(parts[0], line, "eta_grid")?,
                    hi: parse_num(parts[1], line, "eta_grid")?,
                    steps: parse_num(parts[2], line, "eta_grid")?,
                });
            }
            "n_starts" => cfg.solver.n_starts = parse_num(v, line, "n_starts")?,
            "seed" => cfg.solver.seed = parse_num(v, line, "seed")?,
            "max_iters" => cfg.solver.max_iters = parse_num(v, line, "max_iters")?,
            "tol_residual" => cfg.solver.tol_residual = parse_num(v, line, "tol_residual")?,
            "tol_step" => cfg.solver.tol_step = parse_num(v, line, "tol_step")?,
            "damping" => cfg.solver.damping = parse_num(v, line, "damping")?,
            "sample_radius" => cfg.solver.sample_radius = parse_num(v, line, "sample_radius")?,
            "dedup_tol" => cfg.solver.dedup_tol = parse_num(v, line, "dedup_tol")?,
            "collision_floor" => cfg.solver.collision_floor = parse_num(v, line, "collision_floor")?,
            "output_dir" => cfg.output_dir = PathBuf::from(v),
            "formats" => {
                let mut f: Vec<Format> = list(v).iter().map(|s| s.parse().map_err(perr)).collect::<Result<_, _>>()?;
                f.sort();
                f.dedup();
                cfg.formats = f;
            }
            "order_mode" => {
                cfg.order_mode = match v {
                    "equal" => DiagramModes::Equal,
                    "nonequal" => DiagramModes::Nonequal,
                    "both" => DiagramModes::Both,
                    _ => return Err(perr(format!("order_mode: unknown value '{v}'"))),
                }
            }
            "include_v3" => cfg.include_v3 = parse_bool(v, line, "include_v3")?,
            "input" => cfg.input = Some(PathBuf::from(v)),
            _ => return Err(perr(format!("unknown key '{key}'"))),
        }
    }
    if let Some(c) = overrides.command {
        cfg.command = c;
    }
    if let Some(s) = overrides.seed {
        cfg.solver.seed = s;
    }
    if let Some(k) = overrides.starts {
        cfg.solver.n_starts = k;
    }
    if let Some(o) = &overrides.out {
        cfg.output_dir = o.clone();
    }
    cfg.include_v3 |= overrides.include_v3;
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    if let Some(eta) = cfg.eta {
        ShapeParam::new(eta).map_err(|_| invalid("eta", format!("{eta} is outside [0, 1)")))?;
    }
    if let Some(g) = cfg.eta_grid {
        let ok = 0.0 <= g.lo && g.lo <= g.hi && g.hi < 1.0 && g.steps >= 1 && (g.steps > 1 || g.lo == g.hi);
        if !ok {
            return Err(invalid("eta_grid", "need 0 <= lo <= hi < 1 and steps >= 1 (steps = 1 needs lo = hi)"));
        }
    }
    match &cfg.masses {
        None if cfg.command.needs_masses() => return Err(invalid("masses", "masses required")),
        Some(m) => {
            if !(MIN_BODIES..=MAX_BODIES).contains(&m.len()) {
                return Err(invalid("masses", format!("need between {MIN_BODIES} and {MAX_BODIES} bodies")));
            }
            validate_masses(m).map_err(|e| invalid("masses", e.to_string()))?;
        }
        None => {}
    }
    if cfg.command == Command::Masscond && cfg.masses.as_ref().is_some_and(|m| m.len() != 4) {
        return Err(invalid("masses", "mass conditions need exactly 4 bodies"));
    }
    if cfg.command == Command::Masscond {
        if let Some(g) = cfg.eta_grid {
            if !(g.lo < g.hi && g.steps >= 2) {
                return Err(invalid("eta_grid", "scan needs lo < hi and steps >= 2"));
            }
        }
    }
    if cfg.command == Command::Verify && cfg.input.is_none() {
        return Err(invalid("input", "verify needs an input report"));
    }
    cfg.solver.validate().map_err(|e| invalid("solver", e.to_string()))?;
    if cfg.formats.is_empty() {
        return Err(invalid("formats", "at least one format"));
    }
    Ok(())
}

impl RunConfig {
    /// Canonical text form; parsing it gives back the same configuration.
    pub fn to_canonical_text(&self) -> String {
        let mut s = String::new();
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let _ = writeln!(s, "command = {}", self.command.name());
        if let Some(m) = &self.masses {
            let _ = writeln!(s, "masses = {}", join(m));
        }
        if let Some(e) = self.eta {
            let _ = writeln!(s, "eta = {e}");
        }
        if let Some(g) = self.eta_grid {
            let _ = writeln!(s, "eta_grid = {}, {}, {}", g.lo, g.hi, g.steps);
        }
        let o = &self.solver;
        let _ = writeln!(s, "n_starts = {}", o.n_starts);
        let _ = writeln!(s, "seed = {}", o.seed);
        let _ = writeln!(s, "max_iters = {}", o.max_iters);
        let _ = writeln!(s, "tol_residual = {:e}", o.tol_residual);
        let _ = writeln!(s, "tol_step = {:e}", o.tol_step);
        let _ = writeln!(s, "damping = {}", o.damping);
        let _ = writeln!(s, "sample_radius = {}", o.sample_radius);
        let _ = writeln!(s, "dedup_tol = {:e}", o.dedup_tol);
        let _ = writeln!(s, "collision_floor = {:e}", o.collision_floor);
        let _ = writeln!(s, "output_dir = {}", self.output_dir.display());
        let fmts: Vec<&str> = self
            .formats
            .iter()
            .map(|f| match f {
                Format::Json => "json",
                Format::Csv => "csv",
                Format::Svg => "svg",
            })
            .collect();
        let _ = writeln!(s, "formats = {}", fmts.join(", "));
        let om = match self.order_mode {
            DiagramModes::Equal => "equal",
            DiagramModes::Nonequal => "nonequal",
            DiagramModes::Both => "both",
        };
        let _ = writeln!(s, "order_mode = {om}");
        let _ = writeln!(s, "include_v3 = {}", self.include_v3);
        if let Some(i) = &self.input {
            let _ = writeln!(s, "input = {}", i.display());
        }
        s
    }

    fn mass_vector(&self) -> Result<MassVector, ConfigError> {
        let m = self.masses.as_ref().ok_or_else(|| invalid("masses", "masses required"))?;
        validate_masses(m).map_err(|e| invalid("masses", e.to_string()))
    }
}

// ---------- payloads ----------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alignment {
    /// On the x-axis (`η > 0`).
    X,
    /// On the y-axis (`η > 0`).
    Y,
    /// Collinear along some other line (possible only for `η = 0`).
    Line,
    /// Not collinear.
    Planar,
}

pub fn alignment(config: &PlanarConfig) -> Alignment {
    let scale = config.max_abs_coordinate().max(f64::MIN_POSITIVE);
    let tol = AXIS_TOL * scale;
    let pts = config.positions();
    if pts.iter().all(|p| p[1].abs() < tol) {
        return Alignment::X;
    }
    if pts.iter().all(|p| p[0].abs() < tol) {
        return Alignment::Y;
    }
    let base = config.point(0);
    let far = (1..config.len())
        .max_by(|&a, &b| (config.point(a) - base).norm().total_cmp(&(config.point(b) - base).norm()))
        .unwrap_or(0);
    let dir = config.point(far) - base;
    let on_line = (0..config.len()).all(|j| {
        let v = config.point(j) - base;
        (dir.x * v.y - dir.y * v.x).abs() < tol * dir.norm().max(f64::MIN_POSITIVE)
    });
    if on_line {
        Alignment::Line
    } else {
        Alignment::Planar
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub n_classes: usize,
    pub x_axis: usize,
    pub y_axis: usize,
    pub other_collinear: usize,
    pub planar: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvePayload {
    pub masses: Vec<f64>,
    pub eta: f64,
    pub symmetry: String,
    pub summary: SolveSummary,
    pub alignments: Vec<Alignment>,
    pub multistart: MultistartReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogVerdict {
    pub name: String,
    pub order_mode: OrderMode,
    pub encoding: String,
    pub key: String,
    pub verdict: Verdict,
    pub mass_condition: Option<MassConditionId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramsPayload {
    pub catalog: Vec<CatalogVerdict>,
    pub enumerations: Vec<EnumerationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionValue {
    pub condition: MassConditionId,
    pub residuals: Vec<f64>,
    pub normalized: Vec<f64>,
    pub within_tolerance: bool,
    pub infeasible_for_positive: bool,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MasscondPayload {
    pub masses: Vec<f64>,
    /// Evaluation point for `values` (`eta` from the config, else 0).
    pub eta: f64,
    pub values: Vec<ConditionValue>,
    pub scan: ExceptionalScanReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifiedClass {
    pub index: usize,
    pub invariants: Option<InvariantReport>,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyPayload {
    pub input: String,
    pub masses: Vec<f64>,
    pub eta: f64,
    pub classes: Vec<VerifiedClass>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Payload {
    Solve(SolvePayload),
    Sweep(SweepReport),
    Diagrams(DiagramsPayload),
    Masscond(MasscondPayload),
    Verify(VerifyPayload),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub timestamp: String,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    pub command: Command,
    pub payload: Payload,
    pub exit_code: i32,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read {path}: {message}")]
    Input { path: String, message: String },
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
    #[error("{0}")]
    Numerical(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        }
    }
}

fn timestamp() -> String {
    humantime::format_rfc3339_seconds(SystemTime::now()).to_string()
}

fn solve_payload(cfg: &RunConfig) -> Result<(SolvePayload, i32), RunError> {
    let masses = cfg.mass_vector()?;
    let eta = cfg.eta.unwrap_or(0.0);
    let shape = ShapeParam::new(eta).map_err(|e| invalid("eta", e.to_string()))?;
    let ms = solver::multistart_report(&masses, shape, &cfg.solver).map_err(|e| RunError::Numerical(e.to_string()))?;
    let alignments: Vec<Alignment> = ms.classes.iter().map(|c| alignment(&c.canonical)).collect();
    let count = |a: Alignment| alignments.iter().filter(|x| **x == a).count();
    let summary = SolveSummary {
        n_classes: ms.classes.len(),
        x_axis: count(Alignment::X),
        y_axis: count(Alignment::Y),
        other_collinear: count(Alignment::Line),
        planar: count(Alignment::Planar),
    };
    let code = if ms.classes.is_empty() { EXIT_NUMERICAL } else { EXIT_OK };
    Ok((
        SolvePayload {
            masses: masses.as_slice().to_vec(),
            eta,
            symmetry: format!("{:?}", shape.symmetry_mode()),
            summary,
            alignments,
            multistart: ms,
        },
        code,
    ))
}

fn sweep_payload(cfg: &RunConfig) -> Result<(SweepReport, i32), RunError> {
    let masses = cfg.mass_vector()?;
    let grid = match (cfg.eta_grid, cfg.eta) {
        (Some(g), _) => g.points(),
        (None, Some(e)) => vec![e],
        (None, None) => return Err(invalid("eta_grid", "sweep needs eta_grid or eta").into()),
    };
    let r = solver::sweep_eta(&masses, &grid, &cfg.solver, cfg.include_v3).map_err(|e| RunError::Numerical(e.to_string()))?;
    let code = if r.rows.iter().any(|row| row.n_classes == 0) { EXIT_NUMERICAL } else { EXIT_OK };
    Ok((r, code))
}

fn diagrams_payload(cfg: &RunConfig) -> DiagramsPayload {
    let catalog = diagrams::catalog()
        .into_iter()
        .map(|e| CatalogVerdict {
            name: e.name,
            order_mode: e.representative.order_mode,
            encoding: e.representative.encoding(),
            key: e.representative.class_key(),
            verdict: diagrams::check_rules(&e.representative),
            mass_condition: e.mass_condition,
        })
        .collect();
    let enumerations = cfg
        .order_mode
        .modes()
        .into_iter()
        .map(|m| diagrams::enumerate_report(m, Tiers::Full))
        .collect();
    DiagramsPayload { catalog, enumerations }
}

fn masscond_payload(cfg: &RunConfig) -> Result<MasscondPayload, RunError> {
    let masses = cfg.mass_vector()?;
    let eta = cfg.eta.unwrap_or(0.0);
    let g = cfg.eta_grid.unwrap_or(EtaGrid { lo: 0.0, hi: 0.999, steps: 2000 });
    let scan = massconds::scan_exceptional(&masses, g.lo, g.hi, g.steps, cfg.include_v3)
        .map_err(|e| invalid("eta_grid", e.to_string()))?;
    let values = MassConditionId::ALL
        .iter()
        .map(|&id| {
            let residuals = massconds::eval_condition(id, &masses, eta).map_err(|e| invalid("masses", e.to_string()))?;
            let normalized = massconds::normalized_residuals(id, &masses, eta).map_err(|e| invalid("masses", e.to_string()))?;
            let gap = massconds::condition_gap(id, &masses, eta).map_err(|e| invalid("masses", e.to_string()))?;
            let (infeasible, reason) = massconds::infeasible_for_positive(id);
            Ok(ConditionValue {
                condition: id,
                residuals,
                normalized,
                within_tolerance: gap < massconds::NEAR_MEMBERSHIP,
                infeasible_for_positive: infeasible,
                reason: reason.to_string(),
            })
        })
        .collect::<Result<_, RunError>>()?;
    Ok(MasscondPayload { masses: masses.as_slice().to_vec(), eta, values, scan })
}

fn input_error(path: &Path, message: impl Into<String>) -> RunError {
    RunError::Input { path: path.display().to_string(), message: message.into() }
}

/// Re-check every class of a saved solve report.
pub fn verify_file(path: &Path) -> Result<VerifyPayload, RunError> {
    let text = fs::read_to_string(path).map_err(|e| input_error(path, e.to_string()))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| input_error(path, e.to_string()))?;
    let solve = v
        .pointer("/payload/solve")
        .ok_or_else(|| input_error(path, "not a solve report"))?;
    let masses: Vec<f64> = serde_json::from_value(solve["masses"].clone()).map_err(|e| input_error(path, e.to_string()))?;
    let eta = solve["eta"].as_f64().ok_or_else(|| input_error(path, "missing eta"))?;
    let masses_v = validate_masses(&masses).map_err(|e| input_error(path, e.to_string()))?;
    let shape = ShapeParam::new(eta).map_err(|e| input_error(path, e.to_string()))?;
    let classes = solve
        .pointer("/multistart/classes")
        .and_then(Value::as_array)
        .ok_or_else(|| input_error(path, "missing classes"))?;
    let thresholds = InvariantThresholds::default();
    let mut out = Vec::new();
    for (index, c) in classes.iter().enumerate() {
        let config: PlanarConfig =
            serde_json::from_value(c["canonical"].clone()).map_err(|e| input_error(path, e.to_string()))?;
        let (invariants, violations) = match InvariantReport::compute(&config, &masses_v, shape) {
            Ok(r) => {
                let v = r.violations(shape, &thresholds).into_iter().map(String::from).collect();
                (Some(r), v)
            }
            Err(e) => (None, vec![e.to_string()]),
        };
        out.push(VerifiedClass { index, invariants, violations });
    }
    let passed = out.iter().all(|c| c.violations.is_empty());
    Ok(VerifyPayload { input: path.display().to_string(), masses, eta, classes: out, passed })
}

/// Run the configured command without touching the filesystem (except
/// for reading the `verify` input).
pub fn execute(cfg: &RunConfig) -> Result<Report, RunError> {
    let (payload, exit_code) = match cfg.command {
        Command::Solve => {
            let (p, c) = solve_payload(cfg)?;
            (Payload::Solve(p), c)
        }
        Command::Sweep => {
            let (p, c) = sweep_payload(cfg)?;
            (Payload::Sweep(p), c)
        }
        Command::Diagrams => (Payload::Diagrams(diagrams_payload(cfg)), EXIT_OK),
        Command::Masscond => (Payload::Masscond(masscond_payload(cfg)?), EXIT_OK),
        Command::Verify => {
            let input = cfg.input.as_ref().ok_or_else(|| invalid("input", "verify needs an input report"))?;
            let p = verify_file(input)?;
            let code = if p.passed { EXIT_OK } else { EXIT_INVARIANT };
            (Payload::Verify(p), code)
        }
    };
    Ok(Report {
        meta: Meta {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            seed: cfg.solver.seed,
            timestamp: timestamp(),
            config: cfg.clone(),
        },
        command: cfg.command,
        payload,
        exit_code,
    })
}

// ---------- CSV ----------

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        String::new()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Fixed CSV columns for each command; the header row is always written.
pub fn to_csv(report: &Report) -> String {
    let mut s = String::new();
    match &report.payload {
        Payload::Solve(p) => {
            let n = p.masses.len();
            let mut head = vec!["class".to_string(), "alignment".to_string()];
            for j in 1..=n {
                head.push(format!("x{j}"));
                head.push(format!("y{j}"));
            }
            head.extend(
                ["residual_norm", "orbit_size", "hits", "min_rij", "max_rij", "jacobian_condition", "is_minus_u", "xy_moment", "com_norm", "lift_residual"]
                    .map(String::from),
            );
            let _ = writeln!(s, "{}", head.join(","));
            for (i, c) in p.multistart.classes.iter().enumerate() {
                let mut row = vec![i.to_string(), format!("{:?}", p.alignments[i]).to_lowercase()];
                row.extend(c.canonical.to_flat().into_iter().map(num));
                row.extend([
                    num(c.residual_norm),
                    c.orbit_size.to_string(),
                    c.hits.to_string(),
                    num(c.min_rij),
                    num(c.max_rij),
                    num(c.jacobian_condition),
                    num(c.invariants.is_minus_u),
                    num(c.invariants.xy_moment),
                    num(c.invariants.com_norm),
                    num(c.invariants.lift_residual),
                ]);
                let _ = writeln!(s, "{}", row.join(","));
            }
        }
        Payload::Sweep(p) => {
            let _ = writeln!(
                s,
                "eta,n_classes,min_rij,max_rij,prod_12_34,prod_13_24,prod_14_23,nearest_condition,nearest_residual"
            );
            for r in &p.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    r.eta,
                    r.n_classes,
                    num(r.min_rij),
                    num(r.max_rij),
                    opt(r.prod_12_34),
                    opt(r.prod_13_24),
                    opt(r.prod_14_23),
                    r.nearest_condition.map(|c| c.to_string()).unwrap_or_default(),
                    opt(r.nearest_residual),
                );
            }
        }
        Payload::Diagrams(p) => {
            let _ = writeln!(s, "order_mode,key,names,members,mass_conditions");
            for e in &p.enumerations {
                for c in &e.classes {
                    let names = if c.names.is_empty() { "Unnamed".to_string() } else { c.names.join(" ") };
                    let conds: Vec<String> = c.mass_conditions.iter().map(|m| m.to_string()).collect();
                    let _ = writeln!(s, "{},{},{},{},{}", e.order_mode, c.key, names, c.members, conds.join(" "));
                }
            }
        }
        Payload::Masscond(p) => {
            let _ = writeln!(s, "condition,eta");
            for r in &p.scan.roots {
                let _ = writeln!(s, "{},{}", r.condition, r.eta);
            }
        }
        Payload::Verify(p) => {
            let _ = writeln!(s, "class,violations");
            for c in &p.classes {
                let _ = writeln!(s, "{},{}", c.index, c.violations.join(" "));
            }
        }
    }
    s
}

// ---------- SVG ----------

/// Static scatter of each solution class; marker radius grows with mass.
pub fn to_svg(report: &Report) -> Option<String> {
    let Payload::Solve(p) = &report.payload else {
        return None;
    };
    let classes = &p.multistart.classes;
    let cols = 4usize;
    let cell = 200.0;
    let rows = classes.len().div_ceil(cols).max(1);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        cols as f64 * cell,
        rows as f64 * cell,
        cols as f64 * cell,
        rows as f64 * cell
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let mmax = p.masses.iter().cloned().fold(0.0, f64::max);
    for (i, c) in classes.iter().enumerate() {
        let (ox, oy) = ((i % cols) as f64 * cell, (i / cols) as f64 * cell);
        let scale = 0.4 * cell / c.canonical.max_abs_coordinate().max(1e-12);
        let (cx, cy) = (ox + cell / 2.0, oy + cell / 2.0);
        let _ = writeln!(
            s,
            r##"<g><rect x="{ox}" y="{oy}" width="{cell}" height="{cell}" fill="none" stroke="#ccc"/><text x="{}" y="{}" font-size="12">class {i}</text>"##,
            ox + 6.0,
            oy + 16.0
        );
        let _ = writeln!(
            s,
            r##"<line x1="{ox}" y1="{cy}" x2="{}" y2="{cy}" stroke="#eee"/><line x1="{cx}" y1="{oy}" x2="{cx}" y2="{}" stroke="#eee"/>"##,
            ox + cell,
            oy + cell
        );
        for (j, q) in c.canonical.positions().iter().enumerate() {
            let r = 3.0 + 7.0 * (p.masses[j] / mmax).sqrt();
            let _ = writeln!(
                s,
                r##"<circle cx="{:.3}" cy="{:.3}" r="{r:.2}" fill="#2b6cb0" fill-opacity="0.8"/>"##,
                cx + scale * q[0],
                cy - scale * q[1]
            );
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Some(s)
}

/// Write the requested formats into the output directory.
pub fn write_outputs(report: &Report, cfg: &RunConfig) -> Result<Vec<PathBuf>, RunError> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| RunError::Output { path: dir.display().to_string(), source: e })?;
    let stem = report.command.name();
    let mut written = Vec::new();
    for f in &cfg.formats {
        let (ext, body) = match f {
            Format::Json => ("json", Some(report.to_json())),
            Format::Csv => ("csv", Some(to_csv(report))),
            Format::Svg => ("svg", to_svg(report)),
        };
        if let Some(body) = body {
            let path = dir.join(format!("{stem}.{ext}"));
            fs::write(&path, body).map_err(|e| RunError::Output { path: path.display().to_string(), source: e })?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Execute and write reports; returns the process exit code.
pub fn run(cfg: &RunConfig) -> (i32, Result<Report, RunError>) {
    match execute(cfg) {
        Ok(report) => match write_outputs(&report, cfg) {
            Ok(_) => (report.exit_code, Ok(report)),
            Err(e) => (e.exit_code(), Err(e)),
        },
        Err(e) => (e.exit_code(), Err(e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_example() {
        let c = parse_config("masses = 1,1,1,1\neta = 0.1\ncommand = solve").unwrap();
        assert_eq!(c.masses.as_deref(), Some(&[1.0, 1.0, 1.0, 1.0][..]));
        assert_eq!(c.eta, Some(0.1));
        assert_eq!(c.command, Command::Solve);
    }

    #[test]
    fn eta_out_of_range() {
        match parse_config("eta = 1.5") {
            Err(ConfigError::Validation { field, .. }) => assert_eq!(field, "eta"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn masses_required() {
        match parse_config("eta = 0.1") {
            Err(ConfigError::Validation { field, message }) => {
                assert_eq!(field, "masses");
                assert!(message.contains("required"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_config("command = diagrams").is_ok());
    }

    #[test]
    fn parse_errors_carry_lines() {
        match parse_config("# c\nmasses = 1,1\nbogus = 3") {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse_config("masses = 1,x") {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("masses = 1,1\nmasses = 2,2"), Err(ConfigError::Parse { line: 2, .. })));
        assert!(matches!(parse_config("masses 1,1"), Err(ConfigError::Parse { line: 1, .. })));
    }

    #[test]
    fn overrides_win() {
        let o = Overrides {
            command: Some(Command::Sweep),
            seed: Some(9),
            starts: Some(17),
            out: Some(PathBuf::from("x")),
            include_v3: true,
        };
        let c = parse_config_with("masses = 1,2,3\neta = 0.1\nseed = 1", &o).unwrap();
        assert_eq!((c.command, c.solver.seed, c.solver.n_starts), (Command::Sweep, 9, 17));
        assert_eq!(c.output_dir, PathBuf::from("x"));
        assert!(c.include_v3);
    }

    #[test]
    fn grid_points() {
        let g = EtaGrid { lo: 0.02, hi: 0.1, steps: 5 };
        let p = g.points();
        assert_eq!(p.len(), 5);
        assert_eq!(p[0], 0.02);
        assert_eq!(p[4], 0.1);
        assert!((p[2] - 0.06).abs() < 1e-15);
    }

    #[test]
    fn alignments() {
        let x = PlanarConfig::new(vec![[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]);
        assert_eq!(alignment(&x), Alignment::X);
        assert_eq!(alignment(&x.rotated(std::f64::consts::FRAC_PI_2)), Alignment::Y);
        assert_eq!(alignment(&x.rotated(0.3)), Alignment::Line);
        let t = PlanarConfig::new(vec![[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]);
        assert_eq!(alignment(&t), Alignment::Planar);
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn canonical_text_round_trips(
            masses in prop::collection::vec(0.01f64..100.0, 2..=8),
            eta in prop::option::of(0.0f64..0.999),
            seed in any::<u64>(),
            starts in 1usize..100_000,
            tol in 1e-15f64..1e-6,
            v3 in any::<bool>(),
        ) {
            let mut text = format!("masses = {}\nseed = {seed}\nn_starts = {starts}\ntol_residual = {tol}\ninclude_v3 = {v3}\nformats = svg, json\n",
                masses.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","));
            if let Some(e) = eta {
                text.push_str(&format!("eta = {e}\n"));
            }
            let a = parse_config(&text).unwrap();
            let canon = a.to_canonical_text();
            let b = parse_config(&canon).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(canon, b.to_canonical_text());
        }
    }
}
