//! Minimum-energy regulation with all actuators and after actuator loss.
//!
//! Every optimal control here is a constant equal to the least-norm mean
//! that steers `x0` to the origin at `t_f`:
//!
//! * nominal: `u* = -(1/t_f) B† x0`, energy `(1/t_f) ‖B† x0‖²`;
//! * malfunctioning, for an uncontrolled input with mean `ū_uc`:
//!   `u_c* = -(1/t_f) B_c† (x0 + t_f B_uc ū_uc)`, energy
//!   `(1/t_f) ‖B_c† (x0 + t_f B_uc ū_uc)‖²`.
//!
//! An inadmissible `u_c*` (some component above 1 in magnitude) is flagged
//! in the report rather than rejected.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matkernel::{axpy, norm2, norm2_sq, norm_inf};
use crate::signals::{admissible, sign_vertices, ControlSignal};
use crate::sysmodel::{RegulationTask, SystemModel};

/// Slack allowed on `‖·‖_∞ ≤ 1` when checking the vertex condition.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Default cap on `p` for vertex enumeration.
pub const DEFAULT_VERTEX_CAP: usize = 20;

/// Nominal and (optionally) malfunctioning energies for one task.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub x0: Vec<f64>,
    pub t_f: f64,
    /// `E_N*`
    pub nominal_energy: f64,
    pub nominal_control: ControlSignal,
    /// `t_f ≥ min_tf`
    pub nominal_feasible: bool,
    /// `‖B† x0‖_∞`
    pub min_tf: f64,
    /// Mean of the uncontrolled input.
    pub adversary_mean: Option<Vec<f64>>,
    /// `‖u_uc‖²_{L2}`
    pub adversary_energy: Option<f64>,
    /// `E_M*`
    pub malfunctioning_energy: Option<f64>,
    pub malfunctioning_control: Option<ControlSignal>,
    /// `‖u_c*‖_∞ ≤ 1` for this particular adversary.
    pub malfunctioning_control_admissible: Option<bool>,
    /// `E_M+ = E_M* + ‖u_uc‖²_{L2}`
    pub total_energy: Option<f64>,
    /// Vertex condition: `u_c*` is admissible for every admissible adversary.
    pub malfunctioning_feasible: Option<bool>,
    /// `‖x0 + t_f (B_c ū_c + B_uc ū_uc)‖₂`
    pub regulation_residual: Option<f64>,
}

/// `‖B† x0‖_∞`, the shortest horizon at which the nominal optimum is
/// admissible.
pub fn nominal_min_tf(sys: &SystemModel, x0: &[f64]) -> Result<f64> {
    check_x0(sys, x0)?;
    Ok(norm_inf(&sys.b_pinv().mul_vec(x0)))
}

fn check_x0(sys: &SystemModel, x0: &[f64]) -> Result<()> {
    if x0.len() != sys.n() {
        return Err(Error::DimensionMismatch {
            what: "x0",
            expected: sys.n(),
            got: x0.len(),
        });
    }
    Ok(())
}

/// Constant nominal optimum without the horizon check.
fn nominal_value(sys: &SystemModel, task: &RegulationTask) -> Vec<f64> {
    sys.b_pinv().mul_vec(&task.x0).iter().map(|v| -v / task.t_f).collect()
}

/// `E_N*(x0, t_f) = (1/t_f) ‖B† x0‖²`.
pub fn nominal_energy(sys: &SystemModel, x0: &[f64], t_f: f64) -> f64 {
    norm2_sq(&sys.b_pinv().mul_vec(x0)) / t_f
}

/// Nominal optimal control and its energy.
///
/// Fails with [`Error::InfeasibleHorizon`] when `t_f < ‖B† x0‖_∞`.
pub fn nominal_optimal(sys: &SystemModel, task: &RegulationTask) -> Result<(ControlSignal, f64)> {
    task.check_against(sys)?;
    let min_tf = nominal_min_tf(sys, &task.x0)?;
    if task.t_f < min_tf {
        return Err(Error::InfeasibleHorizon { t_f: task.t_f, min_tf });
    }
    let u = nominal_value(sys, task);
    let energy = task.t_f * norm2_sq(&u);
    Ok((ControlSignal::constant(u, task.t_f)?, energy))
}

/// `B_c† (x0 + t_f B_uc ū_uc)`.
fn compensated(sys: &SystemModel, x0: &[f64], t_f: f64, mean_uc: &[f64]) -> Vec<f64> {
    let drift = sys.b_uc().mul_vec(mean_uc);
    sys.b_c_pinv().mul_vec(&axpy(x0, t_f, &drift))
}

/// Constant controlled input `u_c*` for an adversary with mean `mean_uc`.
pub fn malfunctioning_control_value(sys: &SystemModel, x0: &[f64], t_f: f64, mean_uc: &[f64]) -> Vec<f64> {
    compensated(sys, x0, t_f, mean_uc).iter().map(|v| -v / t_f).collect()
}

/// `E_M*(x0, t_f, u_uc)` given the adversary mean.
pub fn malfunctioning_energy(sys: &SystemModel, x0: &[f64], t_f: f64, mean_uc: &[f64]) -> f64 {
    norm2_sq(&compensated(sys, x0, t_f, mean_uc)) / t_f
}

/// `E_M+ = E_M* + ‖u_uc‖²`, from exact signal statistics.
pub fn total_energy(sys: &SystemModel, x0: &[f64], t_f: f64, u_uc: &ControlSignal) -> f64 {
    let stats = u_uc.stats();
    malfunctioning_energy(sys, x0, t_f, &stats.mean) + stats.l2_energy
}

/// Outcome of the hypercube-vertex feasibility check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexCheck {
    /// `max_v (1/t_f) ‖B_c† (x0 + t_f B_uc v)‖_∞` over `v ∈ {-1, +1}^p`.
    pub max_value: f64,
    pub worst_vertex: Vec<f64>,
    pub feasible: bool,
}

/// Evaluates the vertex condition by enumerating all `2^p` vertices.
pub fn vertex_check(sys: &SystemModel, x0: &[f64], t_f: f64, cap: usize) -> Result<VertexCheck> {
    if sys.p() == 0 {
        return Err(Error::NoLostActuators);
    }
    check_x0(sys, x0)?;
    let mut best = VertexCheck {
        max_value: f64::NEG_INFINITY,
        worst_vertex: Vec::new(),
        feasible: false,
    };
    for v in sign_vertices(sys.p(), cap)? {
        let value = norm_inf(&compensated(sys, x0, t_f, &v)) / t_f;
        if value > best.max_value {
            best.max_value = value;
            best.worst_vertex = v;
        }
    }
    best.feasible = best.max_value <= 1.0 + FEASIBILITY_TOL;
    Ok(best)
}

/// True iff the malfunctioning optimum is admissible for every admissible
/// uncontrolled input at this horizon.
pub fn malfunctioning_feasible(sys: &SystemModel, task: &RegulationTask) -> Result<bool> {
    task.check_against(sys)?;
    Ok(vertex_check(sys, &task.x0, task.t_f, DEFAULT_VERTEX_CAP)?.feasible)
}

/// Energy report with the nominal quantities only.
pub fn nominal_report(sys: &SystemModel, task: &RegulationTask) -> Result<EnergyReport> {
    task.check_against(sys)?;
    let min_tf = nominal_min_tf(sys, &task.x0)?;
    let u = nominal_value(sys, task);
    Ok(EnergyReport {
        x0: task.x0.clone(),
        t_f: task.t_f,
        nominal_energy: task.t_f * norm2_sq(&u),
        nominal_control: ControlSignal::constant(u, task.t_f)?,
        nominal_feasible: task.t_f >= min_tf,
        min_tf,
        adversary_mean: None,
        adversary_energy: None,
        malfunctioning_energy: None,
        malfunctioning_control: None,
        malfunctioning_control_admissible: None,
        total_energy: None,
        malfunctioning_feasible: None,
        regulation_residual: None,
    })
}

/// Optimal controlled input and energies against a given uncontrolled input.
pub fn malfunctioning_optimal(sys: &SystemModel, task: &RegulationTask, u_uc: &ControlSignal) -> Result<EnergyReport> {
    if sys.p() == 0 {
        return Err(Error::NoLostActuators);
    }
    if u_uc.dim() != sys.p() {
        return Err(Error::DimensionMismatch {
            what: "uncontrolled input",
            expected: sys.p(),
            got: u_uc.dim(),
        });
    }
    if (u_uc.horizon() - task.t_f).abs() > 1e-12 * task.t_f {
        return Err(Error::InvalidSignal(format!(
            "uncontrolled input horizon {} differs from t_f = {}",
            u_uc.horizon(),
            task.t_f
        )));
    }
    if !admissible(u_uc) {
        return Err(Error::InvalidSignal("uncontrolled input is not admissible".into()));
    }
    let mut report = nominal_report(sys, task)?;
    let stats = u_uc.stats();
    let (x0, t_f) = (&task.x0, task.t_f);

    let u_c = malfunctioning_control_value(sys, x0, t_f, &stats.mean);
    let e_m = t_f * norm2_sq(&u_c);

    let mut motion = sys.b_c().mul_vec(&u_c);
    for (m, d) in motion.iter_mut().zip(sys.b_uc().mul_vec(&stats.mean)) {
        *m += d;
    }
    let residual = norm2(&axpy(x0, t_f, &motion));

    let check = vertex_check(sys, x0, t_f, DEFAULT_VERTEX_CAP)?;
    report.malfunctioning_control_admissible = Some(norm_inf(&u_c) <= 1.0 + FEASIBILITY_TOL);
    report.malfunctioning_energy = Some(e_m);
    report.total_energy = Some(e_m + stats.l2_energy);
    report.malfunctioning_control = Some(ControlSignal::constant(u_c, t_f)?);
    report.adversary_energy = Some(stats.l2_energy);
    report.adversary_mean = Some(stats.mean);
    report.malfunctioning_feasible = Some(check.feasible);
    report.regulation_residual = Some(residual);
    Ok(report)
}

/// Nominal energy when the lost columns are simply dropped, i.e. the
/// malfunctioning energy against a zero uncontrolled input.
pub fn zero_adversary_energy(sys: &SystemModel, x0: &[f64], t_f: f64) -> f64 {
    malfunctioning_energy(sys, x0, t_f, &vec![0.0; sys.p()])
}
