//! Oracle audit: closed forms against the independent oracles on the
//! configured system and seeded random systems.

use clap::ValueEnum;
use enres_core::bruteforce::{
    adversary_search, min_energy_fixed_mean, oracle_malfunctioning_energy, random_instance, random_programs,
};
use enres_core::energy::malfunctioning_energy;
use enres_core::matkernel::{norm2, norm2_sq};
use enres_core::{malfunctioning_optimal, simulate, worst_case_bound, RegulationTask, SystemModel};
use serde::Serialize;

use crate::commands::{CliError, OutputTarget};
use crate::config::{Format, LoadedConfig};

/// Deliberate formula corruptions used to confirm that the audit can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Ignore the uncontrolled input's mean in the malfunctioning energy.
    DropUncontrolled,
    /// Subtract instead of add the cross term in the exact worst case.
    CrossSign,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub instances: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub random_systems: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutation: Option<Mutation>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

struct Instance {
    system: SystemModel,
    task: RegulationTask,
}

#[derive(Default)]
struct Tally {
    instances: usize,
    worst: f64,
}

impl Tally {
    fn record(&mut self, deviation: f64) {
        self.instances += 1;
        if deviation.is_nan() || deviation > self.worst {
            self.worst = if deviation.is_nan() { f64::INFINITY } else { deviation };
        }
    }

    fn check(self, name: &str, tolerance: f64) -> Check {
        Check {
            name: name.to_string(),
            instances: self.instances,
            max_deviation: self.worst,
            tolerance,
            pass: self.worst <= tolerance,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn instances(cfg: &LoadedConfig) -> Result<Vec<Instance>, CliError> {
    let v = &cfg.config.verify;
    let mut out = Vec::new();
    let sys = cfg.system()?;
    if let Some(task) = cfg.task(&sys)? {
        if sys.p() > 0 {
            out.push(Instance { system: sys, task });
        }
    }
    for i in 0..v.random_systems {
        let seed = v.seed.wrapping_add(i as u64);
        let p = 1 + i % 2;
        let inst = random_instance(seed, v.rows, v.cols, p)
            .map_err(|e| CliError::Config(cfg.error("verify.cols", e.to_string())))?;
        let task = RegulationTask::new(inst.x0, inst.t_f).map_err(|e| CliError::Check(e.to_string()))?;
        out.push(Instance {
            system: inst.system,
            task,
        });
    }
    Ok(out)
}

pub fn verify_report(cfg: &LoadedConfig, mutation: Option<Mutation>) -> Result<VerifyReport, CliError> {
    cfg.check_tolerances()?;
    cfg.check_verify()?;
    let tol = &cfg.config.tolerances;
    let v = &cfg.config.verify;
    let insts = instances(cfg)?;
    let fail = |e: enres_core::Error| CliError::Check(e.to_string());

    let mut spread = Tally::default();
    let mut fixed_energy = Tally::default();
    for prog in random_programs(v.seed, v.fixed_mean_instances) {
        let sol = min_energy_fixed_mean(&prog);
        spread.record(sol.spread);
        fixed_energy.record(rel(sol.energy, prog.horizon * norm2_sq(&prog.mean)));
    }

    let mut oracle = Tally::default();
    let mut regulation = Tally::default();
    let mut collapse = Tally::default();
    let mut dominance = Tally::default();
    let mut attainment = Tally::default();
    let mut search_excess = Tally::default();
    let mut search_gap = Tally::default();

    for inst in &insts {
        let (sys, task) = (&inst.system, &inst.task);
        let catalog = cfg.config.adversaries.generate(sys.p(), task.t_f).map_err(fail)?;
        for e in &catalog {
            let report = malfunctioning_optimal(sys, task, &e.signal).map_err(fail)?;
            let closed = match mutation {
                Some(Mutation::DropUncontrolled) => malfunctioning_energy(sys, &task.x0, task.t_f, &vec![0.0; sys.p()]),
                _ => report.malfunctioning_energy.expect("set for malfunctioning reports"),
            };
            for &k in &v.oracle_pieces {
                let o = oracle_malfunctioning_energy(sys, task, &e.signal, k).map_err(fail)?;
                oracle.record(rel(closed, o.energy));
            }
            let u_c = report
                .malfunctioning_control
                .as_ref()
                .expect("set for malfunctioning reports");
            let tr = simulate(sys, task, u_c, Some(&e.signal), v.trajectory_steps).map_err(fail)?;
            regulation.record(tr.terminal_error / norm2(&task.x0));
        }

        if sys.p() != 1 {
            continue;
        }
        let wc = worst_case_bound(sys, task).map_err(fail)?;
        let mut exact = wc.exact_p1.expect("present for a single lost actuator");
        if mutation == Some(Mutation::CrossSign) {
            exact -= 4.0 * wc.cross[0].abs();
        }
        collapse.record(rel(wc.bound, exact));
        for e in &catalog {
            let total = malfunctioning_optimal(sys, task, &e.signal)
                .map_err(fail)?
                .total_energy
                .unwrap();
            dominance.record(total - exact);
        }
        let worst = wc
            .worst_adversary_p1
            .as_ref()
            .expect("present for a single lost actuator");
        let total = malfunctioning_optimal(sys, task, worst)
            .map_err(fail)?
            .total_energy
            .unwrap();
        attainment.record((total - exact).abs() / exact.max(1.0));

        let found = adversary_search(sys, task, &cfg.config.search).map_err(fail)?;
        search_excess.record(found.value - exact);
        if !wc.degenerate && cfg.config.search.budget >= 500 {
            search_gap.record((exact - found.value) / exact);
        }
    }

    let checks = vec![
        spread.check("fixed_mean_spread", tol.fixed_mean),
        fixed_energy.check("fixed_mean_energy", tol.fixed_mean),
        oracle.check("closed_form_vs_oracle", tol.oracle_rel),
        regulation.check("regulation", tol.regulation),
        collapse.check("single_actuator_collapse", tol.collapse_rel),
        dominance.check("dominance", tol.dominance),
        attainment.check("attainment", tol.attainment),
        search_excess.check("search_below_worst_case", tol.dominance),
        search_gap.check("search_near_worst_case", tol.search_gap),
    ];
    let passed = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        seed: v.seed,
        random_systems: v.random_systems,
        mutation,
        checks,
        passed,
    })
}

pub fn verify(
    cfg: &LoadedConfig,
    out: &OutputTarget,
    mutation: Option<Mutation>,
) -> Result<Vec<std::path::PathBuf>, CliError> {
    let report = verify_report(cfg, mutation)?;
    for c in &report.checks {
        eprintln!(
            "{} {}: {} instances, max deviation {:.3e} (tolerance {:.1e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.instances,
            c.max_deviation,
            c.tolerance
        );
    }
    let json = OutputTarget {
        dir: out.dir.clone(),
        format: Some(Format::Json),
    };
    let written = vec![json.write_json("verify.json", &report)?];
    if !report.passed {
        let failed: Vec<_> = report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        return Err(CliError::Check(failed.join(", ")));
    }
    Ok(written)
}
