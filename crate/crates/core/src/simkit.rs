//! Open-loop trajectory simulation and resilience sweeps over the initial
//! distance `R`.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{malfunctioning_energy, nominal_energy, nominal_min_tf, vertex_check, DEFAULT_VERTEX_CAP};
use crate::error::{Error, Result};
use crate::matkernel::{norm2, scaled};
use crate::signals::{AdversaryCatalog, ControlSignal};
use crate::sysmodel::{RegulationTask, SystemModel};
use crate::worstcase::{worst_case_energy_p1, ResilienceSpectrum};

/// Default tolerance on the sweep ordering invariant.
pub const ORDERING_TOL: f64 = 1e-9;

/// Sampled state trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// `‖x(t_f)‖₂`
    pub terminal_error: f64,
}

/// Simulates `ẋ = B_c u_c + B_uc u_uc` from `task.x0` over `[0, t_f]`.
///
/// `u_c` may instead span all `m + p` actuators with `u_uc = None`, which
/// simulates the nominal system `ẋ = B u`. States are evaluated from the
/// closed-form running integrals of the inputs, so the result is exact up to
/// round-off at each of the `steps + 1` sample times.
pub fn simulate(
    sys: &SystemModel,
    task: &RegulationTask,
    u_c: &ControlSignal,
    u_uc: Option<&ControlSignal>,
    steps: usize,
) -> Result<Trajectory> {
    task.check_against(sys)?;
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    let (m, p) = (sys.m(), sys.p());
    let t_f = task.t_f;
    let check_horizon = |s: &ControlSignal| -> Result<()> {
        if (s.horizon() - t_f).abs() > 1e-12 * t_f {
            return Err(Error::InvalidSignal(format!(
                "signal horizon {} differs from t_f = {t_f}",
                s.horizon()
            )));
        }
        Ok(())
    };
    check_horizon(u_c)?;

    let nominal = u_uc.is_none() && u_c.dim() == m + p;
    if !nominal {
        if u_c.dim() != m {
            return Err(Error::DimensionMismatch {
                what: "controlled input",
                expected: m,
                got: u_c.dim(),
            });
        }
        match u_uc {
            Some(s) => {
                check_horizon(s)?;
                if s.dim() != p {
                    return Err(Error::DimensionMismatch {
                        what: "uncontrolled input",
                        expected: p,
                        got: s.dim(),
                    });
                }
            }
            None if p > 0 => {
                return Err(Error::DimensionMismatch {
                    what: "uncontrolled input",
                    expected: p,
                    got: 0,
                })
            }
            None => {}
        }
    }

    let state_at = |t: f64| -> Vec<f64> {
        let mut x = task.x0.clone();
        let mut add = |delta: Vec<f64>| {
            for (xi, d) in x.iter_mut().zip(delta) {
                *xi += d;
            }
        };
        if nominal {
            add(sys.b().mul_vec(&u_c.integral(t)));
        } else {
            add(sys.b_c().mul_vec(&u_c.integral(t)));
            if let Some(s) = u_uc {
                add(sys.b_uc().mul_vec(&s.integral(t)));
            }
        }
        x
    };

    let times: Vec<f64> = (0..=steps)
        .map(|i| if i == steps { t_f } else { t_f * i as f64 / steps as f64 })
        .collect();
    let mut states: Vec<Vec<f64>> = times.iter().map(|&t| state_at(t)).collect();
    states[0] = task.x0.clone();
    let terminal_error = norm2(states.last().unwrap());
    Ok(Trajectory {
        times,
        states,
        terminal_error,
    })
}

/// How the initial condition is placed on the sphere `‖x0‖₂ = R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum DirectionPolicy {
    /// Pick the sampled direction with the smallest worst-case ratio
    /// `E_N / Ē_M` (smallest adversary ratio when `p ≠ 1`).
    MinWorstRatio {
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// Use one fixed direction (normalised).
    Fixed { direction: Vec<f64> },
}

fn default_samples() -> usize {
    360
}

impl Default for DirectionPolicy {
    fn default() -> Self {
        DirectionPolicy::MinWorstRatio {
            samples: default_samples(),
        }
    }
}

/// Deterministic unit directions in `R^n`: evenly spaced angles for
/// `n = 2`, `±1` for `n = 1`, and the signed coordinate axes plus seeded
/// Gaussian directions otherwise.
pub fn direction_grid(n: usize, samples: usize) -> Vec<Vec<f64>> {
    match n {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..samples)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / samples as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        _ => {
            let mut dirs = Vec::with_capacity(samples.max(2 * n));
            for i in 0..n {
                for s in [1.0, -1.0] {
                    let mut e = vec![0.0; n];
                    e[i] = s;
                    dirs.push(e);
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            while dirs.len() < samples {
                let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let len = norm2(&v);
                if len > 1e-12 {
                    dirs.push(scaled(&v, 1.0 / len));
                }
            }
            dirs
        }
    }
}

/// Ratio curve for one catalog adversary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversaryCurve {
    pub label: String,
    /// `E_N / E_M+` per grid point.
    pub ratios: Vec<f64>,
}

/// A grid point where the ordering bound ≤ worst case ≤ adversary failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingViolation {
    pub radius: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub t_f: f64,
    pub r_grid: Vec<f64>,
    pub direction_policy: DirectionPolicy,
    /// Initial condition used at each grid point.
    pub x0: Vec<Vec<f64>>,
    pub nominal_energy: Vec<f64>,
    /// `E_N / Ē_M` (`p = 1` only).
    pub worst_case_ratio: Option<Vec<f64>>,
    /// Resilience lower bound (`p = 1` only).
    pub metric_bound: Option<Vec<f64>>,
    pub adversaries: Vec<AdversaryCurve>,
    pub catalog: AdversaryCatalog,
    pub tolerance: f64,
    pub violations: Vec<OrderingViolation>,
}

impl SweepResult {
    pub fn ordering_holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// CSV with one row per grid point. Columns: `R`, `x0_1..x0_n`,
    /// `nominal_energy`, `metric_bound`, `worst_case_ratio`, then one
    /// `ratio:<label>` column per adversary. Unavailable cells are empty.
    pub fn to_csv(&self) -> String {
        let n = self.x0.first().map_or(0, Vec::len);
        let mut header = vec!["R".to_string()];
        header.extend((1..=n).map(|i| format!("x0_{i}")));
        header.extend(["nominal_energy", "metric_bound", "worst_case_ratio"].map(String::from));
        header.extend(self.adversaries.iter().map(|a| format!("ratio:{}", a.label)));

        let opt = |v: &Option<Vec<f64>>, i: usize| v.as_ref().map_or(String::new(), |v| v[i].to_string());
        let mut out = header.join(",");
        out.push('\n');
        for (i, r) in self.r_grid.iter().enumerate() {
            let mut row = vec![r.to_string()];
            row.extend(self.x0[i].iter().map(f64::to_string));
            row.push(self.nominal_energy[i].to_string());
            row.push(opt(&self.metric_bound, i));
            row.push(opt(&self.worst_case_ratio, i));
            row.extend(self.adversaries.iter().map(|a| a.ratios[i].to_string()));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

struct Point {
    x0: Vec<f64>,
    nominal: f64,
    worst: Option<f64>,
    bound: Option<f64>,
    adversary: Vec<f64>,
}

/// Sweeps `E_N / E_M+` over `R` for every catalog adversary, together with
/// the exact worst-case ratio and the resilience lower bound when `p = 1`.
///
/// Grid points are evaluated in parallel; results keep grid order.
pub fn sweep_ratios(
    sys: &SystemModel,
    t_f: f64,
    r_grid: &[f64],
    policy: &DirectionPolicy,
    catalog: &AdversaryCatalog,
) -> Result<SweepResult> {
    sweep_ratios_with_tol(sys, t_f, r_grid, policy, catalog, ORDERING_TOL)
}

pub fn sweep_ratios_with_tol(
    sys: &SystemModel,
    t_f: f64,
    r_grid: &[f64],
    policy: &DirectionPolicy,
    catalog: &AdversaryCatalog,
    tolerance: f64,
) -> Result<SweepResult> {
    if !(t_f.is_finite() && t_f > 0.0) {
        return Err(Error::InvalidTask(format!("t_f must be > 0, got {t_f}")));
    }
    if r_grid.is_empty() || r_grid.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidParameter(
            "R grid must be non-empty with positive entries".into(),
        ));
    }
    let p = sys.p();
    if p == 0 {
        return Err(Error::NoLostActuators);
    }
    let n = sys.n();
    let directions = match policy {
        DirectionPolicy::MinWorstRatio { samples } => {
            if *samples == 0 {
                return Err(Error::InvalidParameter("direction samples must be >= 1".into()));
            }
            direction_grid(n, *samples)
        }
        DirectionPolicy::Fixed { direction } => {
            if direction.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "sweep direction",
                    expected: n,
                    got: direction.len(),
                });
            }
            let len = norm2(direction);
            if !(len > 0.0 && len.is_finite()) {
                return Err(Error::InvalidParameter("sweep direction must be non-zero".into()));
            }
            vec![scaled(direction, 1.0 / len)]
        }
    };

    let entries = catalog.generate(p, t_f)?;
    let stats: Vec<_> = entries.iter().map(|e| e.signal.stats()).collect();
    let spectrum = if p == 1 {
        Some(ResilienceSpectrum::new(sys)?)
    } else {
        None
    };

    let adversary_ratios = |x0: &[f64], en: f64| -> Vec<f64> {
        stats
            .iter()
            .map(|s| en / (malfunctioning_energy(sys, x0, t_f, &s.mean) + s.l2_energy))
            .collect()
    };

    let evaluate = |r: f64| -> Result<Point> {
        let mut chosen: Option<(f64, Vec<f64>)> = None;
        for d in &directions {
            let x0 = scaled(d, r);
            let en = nominal_energy(sys, &x0, t_f);
            let score = if p == 1 {
                en / worst_case_energy_p1(sys, &x0, t_f)?
            } else {
                adversary_ratios(&x0, en).into_iter().fold(f64::INFINITY, f64::min)
            };
            if chosen.as_ref().is_none_or(|c| score < c.0) {
                chosen = Some((score, x0));
            }
        }
        let (_, x0) = chosen.expect("direction grid is non-empty");
        let en = nominal_energy(sys, &x0, t_f);
        let worst = if p == 1 {
            Some(en / worst_case_energy_p1(sys, &x0, t_f)?)
        } else {
            None
        };
        Ok(Point {
            adversary: adversary_ratios(&x0, en),
            bound: spectrum.as_ref().map(|s| s.evaluate(t_f, r).lower_bound),
            x0,
            nominal: en,
            worst,
        })
    };

    let points: Vec<Point> = r_grid.par_iter().map(|&r| evaluate(r)).collect::<Result<_>>()?;

    let mut violations = Vec::new();
    for (r, pt) in r_grid.iter().zip(&points) {
        if let (Some(b), Some(w)) = (pt.bound, pt.worst) {
            if b > w + tolerance {
                violations.push(OrderingViolation {
                    radius: *r,
                    detail: format!("metric_bound {b} > worst_case_ratio {w}"),
                });
            }
        }
        let floor = pt.worst.or(pt.bound);
        if let Some(w) = floor {
            for (e, a) in entries.iter().zip(&pt.adversary) {
                if w > a + tolerance {
                    violations.push(OrderingViolation {
                        radius: *r,
                        detail: format!("worst-case ratio {w} > ratio {a} of {}", e.label),
                    });
                }
            }
        }
    }

    let adversaries = entries
        .iter()
        .enumerate()
        .map(|(j, e)| AdversaryCurve {
            label: e.label.clone(),
            ratios: points.iter().map(|pt| pt.adversary[j]).collect(),
        })
        .collect();

    Ok(SweepResult {
        t_f,
        r_grid: r_grid.to_vec(),
        direction_policy: policy.clone(),
        nominal_energy: points.iter().map(|pt| pt.nominal).collect(),
        worst_case_ratio: (p == 1).then(|| points.iter().map(|pt| pt.worst.unwrap()).collect()),
        metric_bound: (p == 1).then(|| points.iter().map(|pt| pt.bound.unwrap()).collect()),
        x0: points.into_iter().map(|pt| pt.x0).collect(),
        adversaries,
        catalog: catalog.clone(),
        tolerance,
        violations,
    })
}

/// `n` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Horizon bracket cap for [`min_tf_search`].
pub const MIN_TF_CAP: f64 = 1e12;
const MIN_TF_FLOOR: f64 = 1e-12;

/// Smallest horizon (within `tol`) at which the vertex condition holds.
///
/// With no lost actuators this is the nominal `‖B† x0‖_∞`. Otherwise a
/// bracket is found by halving / doubling from `t_f = 1` and refined by
/// bisection.
pub fn min_tf_search(sys: &SystemModel, x0: &[f64], tol: f64) -> Result<f64> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be > 0, got {tol}")));
    }
    RegulationTask::new(x0.to_vec(), 1.0)?.check_against(sys)?;
    if sys.p() == 0 {
        return nominal_min_tf(sys, x0);
    }
    let feasible = |t: f64| -> Result<bool> { Ok(vertex_check(sys, x0, t, DEFAULT_VERTEX_CAP)?.feasible) };

    let (mut lo, mut hi);
    if feasible(1.0)? {
        hi = 1.0;
        lo = 0.5;
        while feasible(lo)? {
            hi = lo;
            lo /= 2.0;
            if lo < MIN_TF_FLOOR {
                return Ok(hi);
            }
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        while !feasible(hi)? {
            lo = hi;
            hi *= 2.0;
            if hi > MIN_TF_CAP {
                return Err(Error::NoFeasibleHorizon { cap: MIN_TF_CAP });
            }
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
