//! Worst-case total energy under a hostile uncontrolled input, and the
//! lower bound on the energetic resilience metric.
//!
//! Write `w = B_c† x0`, `G = B_c† B_uc` and `c = Gᵀ w = B_ucᵀ B_c†ᵀ B_c† x0`.
//! For an adversary with mean `ū` and energy `‖u_uc‖²`, the total energy is
//!
//! ```text
//! E_M+ = ‖w‖²/t_f + 2 cᵀū + t_f ūᵀ GᵀG ū + ‖u_uc‖²
//! ```
//!
//! Maximising term by term over `‖u_uc(t)‖_∞ ≤ 1` gives the upper bound
//! `‖w‖²/t_f + t_f Σλ_i(GᵀG)‖V‖₁² + 2‖c‖₁ + t_f p`, which is attained when
//! `p = 1` by the constant input `sign(c)`:
//! `Ē_M = ‖w‖²/t_f + t_f (‖G‖² + 1) + 2|c|`.

use serde::Serialize;

use crate::energy::nominal_energy;
use crate::error::{Error, Result};
use crate::matkernel::{norm1, norm2, norm2_sq, norms, symmetric_eigen, Matrix};
use crate::signals::ControlSignal;
use crate::sysmodel::{RegulationTask, SystemModel};

/// Relative threshold below which the cross term `c` counts as zero.
pub const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCaseReport {
    pub x0: Vec<f64>,
    pub t_f: f64,
    pub p: usize,
    /// Upper bound on the worst-case total energy.
    pub bound: f64,
    /// `(1/t_f) ‖B_c† x0‖²`
    pub term_base: f64,
    /// `t_f Σ λ_i ‖V‖₁²`
    pub term_t1: f64,
    /// `2 ‖c‖₁`
    pub term_t2: f64,
    /// `t_f p`
    pub term_t3: f64,
    /// Eigenvalues of `GᵀG`, descending.
    pub eigenvalues: Vec<f64>,
    /// `‖V‖₁` of the eigenvector matrix.
    pub eigvec_norm1: f64,
    /// `c = B_ucᵀ B_c†ᵀ B_c† x0`
    pub cross: Vec<f64>,
    /// Exact worst-case total energy, `p = 1` only.
    pub exact_p1: Option<f64>,
    /// Constant adversary attaining `exact_p1`.
    pub worst_adversary_p1: Option<ControlSignal>,
    /// `c` vanishes (within tolerance).
    pub degenerate: bool,
}

/// Spectral ingredients and value of the resilience lower bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResilienceReport {
    pub t_f: f64,
    pub radius: f64,
    pub lower_bound: f64,
    /// `λ_min(B†ᵀ B†)`
    pub lam_min_full: f64,
    /// `L = λ_max(B_c†ᵀ B_c†)`
    pub l: f64,
    /// `‖B_ucᵀ B_c†ᵀ B_c†‖₂`
    pub cross_norm: f64,
    /// `‖B_uc‖₂²`, reported for reference.
    pub buc_norm_sq: f64,
    /// `‖B_c† B_uc‖₂²`, the quantity entering the bound.
    pub mapped_buc_norm_sq: f64,
}

impl ResilienceReport {
    /// `R → ∞` (or `t_f → 0`) limit of the bound.
    pub fn asymptote(&self) -> f64 {
        self.lam_min_full / self.l
    }
}

/// `G = B_c† B_uc`
fn mapped_uncontrolled(sys: &SystemModel) -> Matrix {
    sys.b_c_pinv().matmul(sys.b_uc())
}

/// `c = B_ucᵀ B_c†ᵀ B_c† x0` together with `w = B_c† x0`.
fn cross_term(sys: &SystemModel, x0: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let w = sys.b_c_pinv().mul_vec(x0);
    let c = mapped_uncontrolled(sys).transpose().mul_vec(&w);
    (c, w)
}

fn is_degenerate(c: &[f64], w: &[f64]) -> bool {
    norm2(c) <= DEGENERATE_TOL * norm2(w)
}

fn sign_or_plus(v: f64, degenerate: bool) -> f64 {
    if degenerate || v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Upper bound on the worst-case total energy; for `p = 1` the exact value
/// and the attaining adversary are filled in too.
pub fn worst_case_bound(sys: &SystemModel, task: &RegulationTask) -> Result<WorstCaseReport> {
    task.check_against(sys)?;
    let p = sys.p();
    if p == 0 {
        return Err(Error::NoLostActuators);
    }
    let t_f = task.t_f;
    let (c, w) = cross_term(sys, &task.x0);
    let g = mapped_uncontrolled(sys);
    let eig = symmetric_eigen(&g.transpose().matmul(&g))?;
    let v1 = norms(&eig.eigenvectors).one;

    let term_base = norm2_sq(&w) / t_f;
    let term_t1 = t_f * eig.eigenvalues.iter().sum::<f64>() * v1 * v1;
    let term_t2 = 2.0 * norm1(&c);
    let term_t3 = t_f * p as f64;
    let degenerate = is_degenerate(&c, &w);

    let mut report = WorstCaseReport {
        x0: task.x0.clone(),
        t_f,
        p,
        bound: term_base + term_t1 + term_t2 + term_t3,
        term_base,
        term_t1,
        term_t2,
        term_t3,
        eigenvalues: eig.eigenvalues,
        eigvec_norm1: v1,
        cross: c,
        exact_p1: None,
        worst_adversary_p1: None,
        degenerate,
    };
    if p == 1 {
        let exact = exact_p1_value(sys, &task.x0, t_f);
        report.exact_p1 = Some(exact.0);
        report.worst_adversary_p1 = Some(ControlSignal::constant(vec![exact.1], t_f)?);
    }
    Ok(report)
}

/// `(Ē_M, adversary sign)` for `p = 1`.
fn exact_p1_value(sys: &SystemModel, x0: &[f64], t_f: f64) -> (f64, f64) {
    let (c, w) = cross_term(sys, x0);
    let g_sq = norm2_sq(&mapped_uncontrolled(sys).column(0));
    let degenerate = is_degenerate(&c, &w);
    let value = norm2_sq(&w) / t_f + t_f * (g_sq + 1.0) + 2.0 * c[0].abs();
    (value, sign_or_plus(c[0], degenerate))
}

/// Exact worst-case total energy `Ē_M(x0, t_f)` for a single lost actuator.
pub fn worst_case_energy_p1(sys: &SystemModel, x0: &[f64], t_f: f64) -> Result<f64> {
    if sys.p() != 1 {
        return Err(Error::WrongP {
            expected: 1,
            got: sys.p(),
        });
    }
    Ok(exact_p1_value(sys, x0, t_f).0)
}

/// Exact worst case and attaining constant adversary for `p = 1`.
///
/// When the cross term vanishes the adversary is `+1`: the remaining terms
/// are still maximised at full amplitude.
pub fn worst_case_exact_p1(sys: &SystemModel, task: &RegulationTask) -> Result<WorstCaseReport> {
    if sys.p() != 1 {
        return Err(Error::WrongP {
            expected: 1,
            got: sys.p(),
        });
    }
    worst_case_bound(sys, task)
}

/// `E_N* / Ē_M` at one initial condition (`p = 1`).
pub fn worst_case_ratio(sys: &SystemModel, x0: &[f64], t_f: f64) -> Result<f64> {
    Ok(nominal_energy(sys, x0, t_f) / worst_case_energy_p1(sys, x0, t_f)?)
}

/// Lower bound on `r_M(t_f, R)` for `p = 1`:
///
/// ```text
/// R² λ_min(B†ᵀB†) / (R² L + 2 R t_f ‖B_ucᵀB_c†ᵀB_c†‖₂ + t_f² (‖B_c†B_uc‖² + 1))
/// ```
pub fn resilience_lower_bound(sys: &SystemModel, t_f: f64, radius: f64) -> Result<ResilienceReport> {
    if sys.p() != 1 {
        return Err(Error::WrongP {
            expected: 1,
            got: sys.p(),
        });
    }
    if !(t_f.is_finite() && t_f > 0.0) {
        return Err(Error::InvalidTask(format!("t_f must be > 0, got {t_f}")));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidTask(format!("R must be > 0, got {radius}")));
    }
    let spectrum = ResilienceSpectrum::new(sys)?;
    Ok(spectrum.evaluate(t_f, radius))
}

/// The `(t_f, R)`-independent part of the resilience bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ResilienceSpectrum {
    lam_min_full: f64,
    l: f64,
    cross_norm: f64,
    buc_norm_sq: f64,
    mapped_buc_norm_sq: f64,
}

impl ResilienceSpectrum {
    pub fn new(sys: &SystemModel) -> Result<Self> {
        let bp = sys.b_pinv();
        let bcp = sys.b_c_pinv();
        let lam_min_full = symmetric_eigen(&bp.transpose().matmul(bp))?.min();
        if lam_min_full <= 0.0 {
            return Err(Error::NotControllable {
                rank: sys.b().rank(),
                n: sys.n(),
            });
        }
        let gram_c = bcp.transpose().matmul(bcp);
        let l = symmetric_eigen(&gram_c)?.max();
        // ‖M‖₂ with M = B_ucᵀ B_c†ᵀ B_c†, via λ_max(M Mᵀ)
        let m = sys.b_uc().transpose().matmul(&gram_c);
        let cross_norm = symmetric_eigen(&m.matmul(&m.transpose()))?.max().max(0.0).sqrt();
        let buc_norm_sq = symmetric_eigen(&sys.b_uc().transpose().matmul(sys.b_uc()))?.max();
        let g = mapped_uncontrolled(sys);
        let mapped_buc_norm_sq = symmetric_eigen(&g.transpose().matmul(&g))?.max();
        Ok(ResilienceSpectrum {
            lam_min_full,
            l,
            cross_norm,
            buc_norm_sq,
            mapped_buc_norm_sq,
        })
    }

    pub fn evaluate(&self, t_f: f64, radius: f64) -> ResilienceReport {
        let r = radius;
        let den = r * r * self.l + 2.0 * r * t_f * self.cross_norm + t_f * t_f * (self.mapped_buc_norm_sq + 1.0);
        ResilienceReport {
            t_f,
            radius,
            lower_bound: r * r * self.lam_min_full / den,
            lam_min_full: self.lam_min_full,
            l: self.l,
            cross_norm: self.cross_norm,
            buc_norm_sq: self.buc_norm_sq,
            mapped_buc_norm_sq: self.mapped_buc_norm_sq,
        }
    }
}
