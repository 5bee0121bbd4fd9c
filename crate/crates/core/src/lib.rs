//! Minimum-energy regulation of linear driftless systems `ẋ = B u` and the
//! energetic cost of losing control over a subset of actuators.
//!
//! The nominal system is steered to the origin with the pseudoinverse
//! control. When some actuators become uncontrolled, the remaining ones
//! compensate with knowledge of the adversarial signal's mean; the energy
//! penalty is quantified by a closed-form worst case and a resilience
//! lower bound.

pub mod bruteforce;
pub mod energy;
pub mod error;
pub mod matkernel;
pub mod signals;
pub mod simkit;
pub mod sysmodel;
pub mod worstcase;

pub use bruteforce::{adversary_search, oracle_malfunctioning_energy, SearchOptions, SearchResult};
pub use energy::{
    malfunctioning_feasible, malfunctioning_optimal, nominal_energy, nominal_min_tf, nominal_optimal, nominal_report,
    total_energy, vertex_check, EnergyReport, VertexCheck,
};
pub use error::{Error, Result};
pub use matkernel::{pseudoinverse, symmetric_eigen, Matrix, Norms, SymmetricEigen};
pub use signals::{
    admissible, AdversaryCatalog, AdversaryFamily, ControlSignal, LabeledSignal, SignalKind, SignalStats,
};
pub use simkit::{linspace, min_tf_search, simulate, sweep_ratios, DirectionPolicy, SweepResult, Trajectory};
pub use sysmodel::{build_system, underwater_robot, RegulationTask, SystemModel};
pub use worstcase::{
    resilience_lower_bound, worst_case_bound, worst_case_exact_p1, worst_case_ratio, ResilienceReport,
    ResilienceSpectrum, WorstCaseReport,
};
