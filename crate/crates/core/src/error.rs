use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("data length mismatch: {rows}x{cols} matrix needs {expected} entries, got {got}")]
    BadShape {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NonSymmetric { asymmetry: f64 },

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("system is not controllable: rank(B) = {rank} < n = {n}")]
    NotControllable { rank: usize, n: usize },

    #[error("invalid actuator split: {0}")]
    BadSplit(String),

    #[error("invalid regulation task: {0}")]
    InvalidTask(String),

    #[error("invalid control signal: {0}")]
    InvalidSignal(String),

    #[error("horizon t_f = {t_f} is infeasible; need t_f >= {min_tf}")]
    InfeasibleHorizon { t_f: f64, min_tf: f64 },

    #[error("family too large: 2^{p} vertices exceeds the cap p <= {cap}")]
    FamilyTooLarge { p: usize, cap: usize },

    #[error("operation requires at least one lost actuator (p = 0)")]
    NoLostActuators,

    #[error("operation requires p = {expected}, got p = {got}")]
    WrongP { expected: usize, got: usize },

    #[error("no feasible horizon found below t_f = {cap:e}")]
    NoFeasibleHorizon { cap: f64 },

    #[error("controlled input matrix B_c is rank deficient (rank {rank} < n = {n}); regulation is not reachable for every adversary")]
    RankDeficient { rank: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
