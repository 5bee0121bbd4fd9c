//! Run configuration: TOML file with `[system]`, `[task]`, `[adversaries]`,
//! `[search]`, `[sweep]`, `[verify]`, `[tolerances]` and `[output]` sections.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use enres_core::bruteforce::SearchOptions;
use enres_core::signals::AdversaryCatalog;
use enres_core::simkit::{linspace, DirectionPolicy};
use enres_core::{build_system, Error as CoreError, Matrix, RegulationTask, SystemModel};
use serde::{Deserialize, Serialize};

/// Configuration for the robot example used by `paper-repro`.
pub const ROBOT_CONFIG: &str = include_str!("../configs/robot.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSection,
    #[serde(default)]
    pub task: TaskSection,
    #[serde(default)]
    pub adversaries: AdversaryCatalog,
    #[serde(default)]
    pub search: SearchOptions,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    /// Input matrix, row-major.
    pub b: Vec<Vec<f64>>,
    #[serde(default)]
    pub lost_actuators: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSection {
    pub x0: Option<Vec<f64>>,
    pub t_f: Option<f64>,
    /// Initial distance for the resilience bound.
    pub r: Option<f64>,
    pub r_grid: Option<RGrid>,
}

/// Either an explicit list or `{ start, stop, points }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, points: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub direction: DirectionPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub seed: u64,
    /// Number of seeded random systems checked besides the configured one.
    pub random_systems: usize,
    pub rows: usize,
    pub cols: usize,
    pub fixed_mean_instances: usize,
    /// Piece counts used by the discretised oracle.
    pub oracle_pieces: Vec<usize>,
    pub trajectory_steps: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            seed: 0,
            random_systems: 20,
            rows: 3,
            cols: 5,
            fixed_mean_instances: 100,
            oracle_pieces: vec![1, 4, 16],
            trajectory_steps: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Sweep ordering `bound ≤ worst case ≤ adversary`.
    pub ordering: f64,
    /// Closed form against the discretised oracle, relative.
    pub oracle_rel: f64,
    /// Single-actuator bound against the exact worst case, relative.
    pub collapse_rel: f64,
    /// Total energy at the worst adversary against the exact worst case.
    pub attainment: f64,
    /// Allowed excess of any adversary over the exact worst case.
    pub dominance: f64,
    pub fixed_mean: f64,
    /// Allowed relative shortfall of the adversary search.
    pub search_gap: f64,
    /// Terminal error relative to `‖x0‖₂`.
    pub regulation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ordering: 1e-9,
            oracle_rel: 1e-8,
            collapse_rel: 1e-9,
            attainment: 1e-10,
            dominance: 1e-9,
            fixed_mean: 1e-10,
            search_gap: 0.01,
            regulation: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Configuration error with the offending field and, when known, line.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error")?;
        if let Some(line) = self.line {
            write!(f, " at line {line}")?;
        }
        if !self.field.is_empty() {
            write!(f, " in `{}`", self.field)?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Parsed config together with its source text for error locations.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    source: String,
}

impl LoadedConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            field: String::new(),
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| ConfigError {
            field: String::new(),
            line: e.span().map(|s| line_at(text, s.start)),
            message: e.message().trim().to_string(),
        })?;
        Ok(LoadedConfig {
            config,
            source: text.to_string(),
        })
    }

    /// Error for `field` (`section.key`), located in the source text.
    pub fn error(&self, field: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            field: field.to_string(),
            line: locate(&self.source, field),
            message: message.into(),
        }
    }

    pub fn system(&self) -> Result<SystemModel, ConfigError> {
        let b = Matrix::from_rows(&self.config.system.b).map_err(|e| self.error("system.b", e.to_string()))?;
        build_system(b, &self.config.system.lost_actuators).map_err(|e| {
            let field = match e {
                CoreError::NotControllable { .. } => "system.b",
                _ => "system.lost_actuators",
            };
            self.error(field, e.to_string())
        })
    }

    pub fn t_f(&self) -> Result<f64, ConfigError> {
        let t_f = self.config.task.t_f.ok_or_else(|| self.error("task.t_f", "missing"))?;
        if !(t_f.is_finite() && t_f > 0.0) {
            return Err(self.error("task.t_f", format!("must be a positive number, got {t_f}")));
        }
        Ok(t_f)
    }

    /// The regulation task, if `task.x0` is given.
    pub fn task(&self, sys: &SystemModel) -> Result<Option<RegulationTask>, ConfigError> {
        let Some(x0) = &self.config.task.x0 else {
            return Ok(None);
        };
        if x0.len() != sys.n() {
            return Err(self.error(
                "task.x0",
                format!(
                    "expected {} entries to match the rows of system.b, got {}",
                    sys.n(),
                    x0.len()
                ),
            ));
        }
        let mut task =
            RegulationTask::new(x0.clone(), self.t_f()?).map_err(|e| self.error("task.x0", e.to_string()))?;
        if let Some(r) = self.radius()? {
            task = task.with_radius(r).map_err(|e| self.error("task.r", e.to_string()))?;
        }
        Ok(Some(task))
    }

    pub fn require_task(&self, sys: &SystemModel) -> Result<RegulationTask, ConfigError> {
        self.task(sys)?.ok_or_else(|| self.error("task.x0", "missing"))
    }

    pub fn radius(&self) -> Result<Option<f64>, ConfigError> {
        match self.config.task.r {
            Some(r) if !(r.is_finite() && r > 0.0) => Err(self.error("task.r", format!("must be positive, got {r}"))),
            r => Ok(r),
        }
    }

    /// Sweep grid from `task.r_grid`, falling back to the single point `task.r`.
    pub fn r_grid(&self) -> Result<Vec<f64>, ConfigError> {
        let grid = match &self.config.task.r_grid {
            Some(RGrid::List(v)) => v.clone(),
            Some(RGrid::Range { start, stop, points }) => {
                if *points == 0 || stop < start {
                    return Err(self.error("task.r_grid", "range needs points >= 1 and stop >= start"));
                }
                linspace(*start, *stop, *points)
            }
            None => match self.radius()? {
                Some(r) => vec![r],
                None => return Err(self.error("task.r_grid", "missing (give task.r_grid or task.r)")),
            },
        };
        if grid.is_empty() {
            return Err(self.error("task.r_grid", "must not be empty"));
        }
        if let Some(bad) = grid.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(self.error("task.r_grid", format!("entries must be positive, got {bad}")));
        }
        Ok(grid)
    }

    pub fn check_tolerances(&self) -> Result<(), ConfigError> {
        let t = &self.config.tolerances;
        for (name, v) in [
            ("ordering", t.ordering),
            ("oracle_rel", t.oracle_rel),
            ("collapse_rel", t.collapse_rel),
            ("attainment", t.attainment),
            ("dominance", t.dominance),
            ("fixed_mean", t.fixed_mean),
            ("search_gap", t.search_gap),
            ("regulation", t.regulation),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(self.error(&format!("tolerances.{name}"), format!("must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    pub fn check_sweep(&self, sys: &SystemModel) -> Result<(), ConfigError> {
        match &self.config.sweep.direction {
            DirectionPolicy::Fixed { direction } if direction.len() != sys.n() => Err(self.error(
                "sweep.direction",
                format!("expected {} entries, got {}", sys.n(), direction.len()),
            )),
            DirectionPolicy::MinWorstRatio { samples: 0 } => Err(self.error("sweep.direction", "samples must be >= 1")),
            _ => Ok(()),
        }
    }

    pub fn check_verify(&self) -> Result<(), ConfigError> {
        let v = &self.config.verify;
        if v.rows == 0 || v.cols < v.rows + 2 {
            return Err(self.error("verify.cols", "random systems need rows >= 1 and cols >= rows + 2"));
        }
        if v.oracle_pieces.is_empty() || v.oracle_pieces.contains(&0) {
            return Err(self.error("verify.oracle_pieces", "piece counts must be >= 1"));
        }
        if v.trajectory_steps == 0 {
            return Err(self.error("verify.trajectory_steps", "must be >= 1"));
        }
        Ok(())
    }

    pub fn apply_seed(&mut self, seed: u64) {
        self.config.adversaries.seed = seed;
        self.config.search.seed = seed;
        self.config.verify.seed = seed;
    }
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of `key` inside `[section]` for a `section.key` path, or of the
/// section header when the key is absent.
fn locate(text: &str, field: &str) -> Option<usize> {
    let (section, key) = field.split_once('.')?;
    let mut in_section = false;
    let mut header = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            in_section = line.trim_start_matches('[').trim_end_matches(']').trim() == section;
            if in_section {
                header = Some(i + 1);
            }
            continue;
        }
        if in_section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}
