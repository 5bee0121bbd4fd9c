use std::fmt;
use std::fs;
use std::path::PathBuf;

use enres_core::bruteforce::{adversary_search, SearchResult};
use enres_core::signals::AdversaryCatalog;
use enres_core::simkit::{min_tf_search, sweep_ratios_with_tol, SweepResult};
use enres_core::worstcase::{resilience_lower_bound, worst_case_bound, ResilienceReport, WorstCaseReport};
use enres_core::{
    malfunctioning_optimal, nominal_optimal, nominal_report, EnergyReport, Error as CoreError, SystemModel,
};
use serde::Serialize;

use crate::config::{ConfigError, Format, LoadedConfig};

/// Failure of a subcommand, mapped to the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid or inconsistent input (exit 2).
    Config(ConfigError),
    /// An invariant or oracle check failed (exit 1).
    Check(String),
    /// Writing outputs failed (exit 1).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Check(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Check(msg) => write!(f, "check failed: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

/// Where and how to write outputs.
#[derive(Debug, Clone)]
pub struct OutputTarget {
    pub dir: PathBuf,
    /// `None` writes every format the command supports.
    pub format: Option<Format>,
}

impl OutputTarget {
    pub fn wants(&self, f: Format) -> bool {
        self.format.is_none_or(|g| g == f)
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.dir).map_err(|e| CliError::Io(format!("{}: {e}", self.dir.display())))?;
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }
}

fn core_config_error(cfg: &LoadedConfig, field: &str, e: CoreError) -> CliError {
    CliError::Config(cfg.error(field, e.to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct AdversaryOutcome {
    pub label: String,
    pub report: EnergyReport,
    /// `E_N* / E_M+`
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub system: SystemModel,
    pub nominal: EnergyReport,
    pub catalog: Option<AdversaryCatalog>,
    pub adversaries: Vec<AdversaryOutcome>,
    pub worst_case: Option<WorstCaseReport>,
    pub resilience: Option<ResilienceReport>,
    /// Smallest horizon meeting the malfunctioning feasibility condition;
    /// `None` if no horizon does or there are no lost actuators.
    pub malfunctioning_min_tf: Option<f64>,
    pub search: Option<SearchResult>,
}

impl AnalyzeReport {
    /// One row per catalog adversary.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "adversary,nominal_energy,malfunctioning_energy,adversary_energy,total_energy,ratio,control_admissible\n",
        );
        for a in &self.adversaries {
            let r = &a.report;
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                a.label,
                r.nominal_energy,
                r.malfunctioning_energy.unwrap_or(f64::NAN),
                r.adversary_energy.unwrap_or(f64::NAN),
                r.total_energy.unwrap_or(f64::NAN),
                a.ratio,
                r.malfunctioning_control_admissible.unwrap_or(false),
            ));
        }
        out
    }
}

pub fn analyze_report(cfg: &LoadedConfig) -> Result<AnalyzeReport, CliError> {
    cfg.check_tolerances()?;
    let sys = cfg.system()?;
    let task = cfg.require_task(&sys)?;
    nominal_optimal(&sys, &task).map_err(|e| core_config_error(cfg, "task.t_f", e))?;
    let nominal = nominal_report(&sys, &task).map_err(|e| core_config_error(cfg, "task.x0", e))?;

    if sys.p() == 0 {
        return Ok(AnalyzeReport {
            system: sys,
            nominal,
            catalog: None,
            adversaries: Vec::new(),
            worst_case: None,
            resilience: None,
            malfunctioning_min_tf: None,
            search: None,
        });
    }

    let catalog = cfg.config.adversaries.clone();
    let entries = catalog
        .generate(sys.p(), task.t_f)
        .map_err(|e| core_config_error(cfg, "adversaries.families", e))?;
    let mut adversaries = Vec::with_capacity(entries.len());
    for e in entries {
        let report = malfunctioning_optimal(&sys, &task, &e.signal).map_err(|err| CliError::Check(err.to_string()))?;
        let ratio = report.nominal_energy / report.total_energy.expect("set for malfunctioning reports");
        adversaries.push(AdversaryOutcome {
            label: e.label,
            report,
            ratio,
        });
    }
    let worst_case = worst_case_bound(&sys, &task).map_err(|e| core_config_error(cfg, "system.b", e))?;
    let resilience = match (sys.p(), cfg.radius()?) {
        (1, Some(r)) => {
            Some(resilience_lower_bound(&sys, task.t_f, r).map_err(|e| core_config_error(cfg, "task.r", e))?)
        }
        _ => None,
    };
    let malfunctioning_min_tf = min_tf_search(&sys, &task.x0, 1e-10 * task.t_f.max(1.0)).ok();
    let search =
        adversary_search(&sys, &task, &cfg.config.search).map_err(|e| core_config_error(cfg, "search.pieces", e))?;

    Ok(AnalyzeReport {
        system: sys,
        nominal,
        catalog: Some(catalog),
        adversaries,
        worst_case: Some(worst_case),
        resilience,
        malfunctioning_min_tf,
        search: Some(search),
    })
}

pub fn analyze(cfg: &LoadedConfig, out: &OutputTarget) -> Result<Vec<PathBuf>, CliError> {
    let report = analyze_report(cfg)?;
    let mut written = Vec::new();
    if out.wants(Format::Json) {
        written.push(out.write_json("analyze.json", &report)?);
    }
    if out.wants(Format::Csv) {
        written.push(out.write("analyze.csv", &report.to_csv())?);
    }
    if let Some(r) = &report.resilience {
        eprintln!("resilience lower bound at R = {}: {}", r.radius, r.lower_bound);
    }
    Ok(written)
}

pub fn sweep_result(cfg: &LoadedConfig) -> Result<SweepResult, CliError> {
    cfg.check_tolerances()?;
    let sys = cfg.system()?;
    cfg.check_sweep(&sys)?;
    let t_f = cfg.t_f()?;
    let grid = cfg.r_grid()?;
    sweep_ratios_with_tol(
        &sys,
        t_f,
        &grid,
        &cfg.config.sweep.direction,
        &cfg.config.adversaries,
        cfg.config.tolerances.ordering,
    )
    .map_err(|e| {
        let field = match e {
            CoreError::NoLostActuators => "system.lost_actuators",
            CoreError::FamilyTooLarge { .. } => "adversaries.max_p",
            _ => "sweep.direction",
        };
        core_config_error(cfg, field, e)
    })
}

/// Writes the sweep; fails with exit code 1 if the ordering was violated.
pub fn sweep(cfg: &LoadedConfig, out: &OutputTarget) -> Result<Vec<PathBuf>, CliError> {
    let res = sweep_result(cfg)?;
    let mut written = Vec::new();
    if out.wants(Format::Csv) {
        written.push(out.write("sweep.csv", &res.to_csv())?);
    }
    if out.wants(Format::Json) {
        written.push(out.write_json("sweep.json", &res)?);
    }
    check_ordering(&res)?;
    Ok(written)
}

fn check_ordering(res: &SweepResult) -> Result<(), CliError> {
    if res.ordering_holds() {
        return Ok(());
    }
    for v in &res.violations {
        eprintln!("ordering violated at R = {}: {}", v.radius, v.detail);
    }
    Err(CliError::Check(format!(
        "{} ordering violation(s)",
        res.violations.len()
    )))
}

/// Analysis plus sweep of the built-in robot configuration.
pub fn paper_repro(cfg: &LoadedConfig, out: &OutputTarget) -> Result<Vec<PathBuf>, CliError> {
    let report = analyze_report(cfg)?;
    let res = sweep_result(cfg)?;
    let json_only = OutputTarget {
        dir: out.dir.clone(),
        format: Some(Format::Json),
    };
    let mut written = vec![json_only.write_json("analyze.json", &report)?];
    if out.wants(Format::Csv) {
        written.push(out.write("sweep.csv", &res.to_csv())?);
    }
    if out.wants(Format::Json) {
        written.push(out.write_json("sweep.json", &res)?);
    }
    if let Some(r) = &report.resilience {
        eprintln!("resilience lower bound at R = {}: {}", r.radius, r.lower_bound);
    }
    if let Some(r) = cfg.config.task.r {
        let sys = cfg.system()?;
        let anchor = sweep_ratios_with_tol(
            &sys,
            res.t_f,
            &[r],
            &cfg.config.sweep.direction,
            &cfg.config.adversaries,
            cfg.config.tolerances.ordering,
        )
        .map_err(|e| core_config_error(cfg, "task.r", e))?;
        if let Some(w) = &anchor.worst_case_ratio {
            eprintln!("worst-case ratio at R = {r}: {}", w[0]);
        }
    }
    check_ordering(&res)?;
    Ok(written)
}

pub fn display_paths(paths: &[PathBuf]) -> String {
    paths
        .iter()
        .map(|p| p.display().to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
