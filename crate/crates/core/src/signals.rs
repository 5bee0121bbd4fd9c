//! Symbolic control signals on `[0, t_f]`.
//!
//! Signals are kept in closed form so means, running integrals and L2
//! energies are exact. Adaptive Gauss-Legendre quadrature is available as an
//! independent cross-check.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{norm2_sq, norm_inf};

/// Shape of a control signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalKind {
    /// `u(t) = value`
    Constant { value: Vec<f64> },
    /// `u_j(t) = amplitude_j · sin(omega · t + phase)`
    Sinusoid {
        amplitude: Vec<f64>,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `u(t) = values[i]` on `[breakpoints[i], breakpoints[i + 1])`; the
    /// last piece is closed at `t_f`.
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

#[derive(Deserialize)]
struct RawSignal {
    horizon: f64,
    #[serde(flatten)]
    kind: SignalKind,
}

/// A vector-valued signal on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSignal")]
pub struct ControlSignal {
    horizon: f64,
    #[serde(flatten)]
    kind: SignalKind,
}

impl TryFrom<RawSignal> for ControlSignal {
    type Error = Error;

    fn try_from(raw: RawSignal) -> Result<Self> {
        ControlSignal::new(raw.kind, raw.horizon)
    }
}

/// Mean value and L2 energy of a signal over its horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalStats {
    /// `(1/t_f) ∫ u dt`
    pub mean: Vec<f64>,
    /// `∫ ‖u(t)‖₂² dt`
    pub l2_energy: f64,
}

impl ControlSignal {
    pub fn new(kind: SignalKind, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidSignal(format!("horizon must be > 0, got {horizon}")));
        }
        let kind = match kind {
            SignalKind::Constant { value } => {
                check_vector("value", &value)?;
                SignalKind::Constant { value }
            }
            SignalKind::Sinusoid {
                amplitude,
                omega,
                phase,
            } => {
                check_vector("amplitude", &amplitude)?;
                if !(omega.is_finite() && phase.is_finite()) {
                    return Err(Error::InvalidSignal("omega and phase must be finite".into()));
                }
                SignalKind::Sinusoid {
                    amplitude,
                    omega,
                    phase,
                }
            }
            SignalKind::PiecewiseConstant {
                mut breakpoints,
                values,
            } => {
                if values.is_empty() || breakpoints.len() != values.len() + 1 {
                    return Err(Error::InvalidSignal(format!(
                        "{} pieces need {} breakpoints, got {}",
                        values.len(),
                        values.len() + 1,
                        breakpoints.len()
                    )));
                }
                let dim = values[0].len();
                for v in &values {
                    check_vector("piece value", v)?;
                    if v.len() != dim {
                        return Err(Error::InvalidSignal("piece values differ in dimension".into()));
                    }
                }
                if breakpoints[0] != 0.0 {
                    return Err(Error::InvalidSignal("breakpoints must start at 0".into()));
                }
                let last = *breakpoints.last().unwrap();
                if (last - horizon).abs() > 1e-12 * horizon {
                    return Err(Error::InvalidSignal(format!(
                        "breakpoints must end at the horizon {horizon}, got {last}"
                    )));
                }
                *breakpoints.last_mut().unwrap() = horizon;
                if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidSignal("breakpoints must be strictly increasing".into()));
                }
                SignalKind::PiecewiseConstant { breakpoints, values }
            }
        };
        Ok(ControlSignal { horizon, kind })
    }

    pub fn constant(value: Vec<f64>, horizon: f64) -> Result<Self> {
        ControlSignal::new(SignalKind::Constant { value }, horizon)
    }

    pub fn sinusoid(amplitude: Vec<f64>, omega: f64, phase: f64, horizon: f64) -> Result<Self> {
        ControlSignal::new(
            SignalKind::Sinusoid {
                amplitude,
                omega,
                phase,
            },
            horizon,
        )
    }

    pub fn piecewise(breakpoints: Vec<f64>, values: Vec<Vec<f64>>, horizon: f64) -> Result<Self> {
        ControlSignal::new(SignalKind::PiecewiseConstant { breakpoints, values }, horizon)
    }

    /// `k` equal-width pieces on `[0, horizon]`.
    pub fn uniform_pieces(values: Vec<Vec<f64>>, horizon: f64) -> Result<Self> {
        let k = values.len();
        let breakpoints = (0..=k).map(|i| horizon * i as f64 / k as f64).collect();
        ControlSignal::piecewise(breakpoints, values, horizon)
    }

    /// Zero signal of the given dimension.
    pub fn zero(dim: usize, horizon: f64) -> Result<Self> {
        ControlSignal::constant(vec![0.0; dim], horizon)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn kind(&self) -> &SignalKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            SignalKind::Constant { value } => value.len(),
            SignalKind::Sinusoid { amplitude, .. } => amplitude.len(),
            SignalKind::PiecewiseConstant { values, .. } => values[0].len(),
        }
    }

    /// The same signal shape on a different horizon. Piecewise breakpoints
    /// are rescaled proportionally.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        let kind = match &self.kind {
            SignalKind::PiecewiseConstant { breakpoints, values } => {
                let s = horizon / self.horizon;
                SignalKind::PiecewiseConstant {
                    breakpoints: breakpoints.iter().map(|b| b * s).collect(),
                    values: values.clone(),
                }
            }
            other => other.clone(),
        };
        ControlSignal::new(kind, horizon)
    }

    /// Value at time `t` (clamped to `[0, horizon]`).
    pub fn value_at(&self, t: f64) -> Vec<f64> {
        let t = t.clamp(0.0, self.horizon);
        match &self.kind {
            SignalKind::Constant { value } => value.clone(),
            SignalKind::Sinusoid {
                amplitude,
                omega,
                phase,
            } => {
                let s = (omega * t + phase).sin();
                amplitude.iter().map(|a| a * s).collect()
            }
            SignalKind::PiecewiseConstant { breakpoints, values } => {
                let idx = breakpoints[1..].iter().position(|&b| t < b).unwrap_or(values.len() - 1);
                values[idx].clone()
            }
        }
    }

    /// Running integral `∫₀ᵗ u(s) ds` in closed form.
    pub fn integral(&self, t: f64) -> Vec<f64> {
        let t = t.clamp(0.0, self.horizon);
        match &self.kind {
            SignalKind::Constant { value } => value.iter().map(|v| v * t).collect(),
            SignalKind::Sinusoid {
                amplitude,
                omega,
                phase,
            } => {
                let f = if *omega == 0.0 {
                    phase.sin() * t
                } else {
                    (phase.cos() - (omega * t + phase).cos()) / omega
                };
                amplitude.iter().map(|a| a * f).collect()
            }
            SignalKind::PiecewiseConstant { breakpoints, values } => {
                let mut acc = vec![0.0; values[0].len()];
                for (i, v) in values.iter().enumerate() {
                    let (a, b) = (breakpoints[i], breakpoints[i + 1]);
                    if t <= a {
                        break;
                    }
                    let w = b.min(t) - a;
                    for (acc, vi) in acc.iter_mut().zip(v) {
                        *acc += vi * w;
                    }
                }
                acc
            }
        }
    }

    /// `sup_t ‖u(t)‖_∞` over the horizon, computed per kind without sampling.
    pub fn sup_norm(&self) -> f64 {
        match &self.kind {
            SignalKind::Constant { value } => norm_inf(value),
            SignalKind::Sinusoid {
                amplitude,
                omega,
                phase,
            } => norm_inf(amplitude) * sup_abs_sin(*phase, omega * self.horizon + phase),
            SignalKind::PiecewiseConstant { values, .. } => values.iter().map(|v| norm_inf(v)).fold(0.0, f64::max),
        }
    }

    /// Exact mean and energy.
    pub fn stats(&self) -> SignalStats {
        let tf = self.horizon;
        let mean = self.integral(tf).iter().map(|v| v / tf).collect();
        let l2_energy = match &self.kind {
            SignalKind::Constant { value } => tf * norm2_sq(value),
            SignalKind::Sinusoid {
                amplitude,
                omega,
                phase,
            } => {
                let sin_sq = if *omega == 0.0 {
                    phase.sin().powi(2) * tf
                } else {
                    tf / 2.0 - ((2.0 * (omega * tf + phase)).sin() - (2.0 * phase).sin()) / (4.0 * omega)
                };
                norm2_sq(amplitude) * sin_sq
            }
            SignalKind::PiecewiseConstant { breakpoints, values } => values
                .iter()
                .enumerate()
                .map(|(i, v)| (breakpoints[i + 1] - breakpoints[i]) * norm2_sq(v))
                .sum(),
        };
        SignalStats { mean, l2_energy }
    }

    /// Mean and energy by adaptive Gauss-Legendre quadrature, split at every
    /// breakpoint.
    pub fn stats_by_quadrature(&self, rel_tol: f64) -> SignalStats {
        let tf = self.horizon;
        let cuts: Vec<f64> = match &self.kind {
            SignalKind::PiecewiseConstant { breakpoints, .. } => breakpoints.clone(),
            _ => vec![0.0, tf],
        };
        let integrate_all = |f: &dyn Fn(f64) -> f64| -> f64 {
            cuts.windows(2)
                .map(|w| {
                    // evaluate each piece strictly inside so the left-closed
                    // convention does not leak across a breakpoint
                    let (a, b) = (w[0], w[1]);
                    integrate(|t| f(t.clamp(a, b - (b - a) * 1e-15)), a, b, rel_tol)
                })
                .sum()
        };
        let mean = (0..self.dim())
            .map(|j| integrate_all(&|t| self.value_at(t)[j]) / tf)
            .collect();
        let l2_energy = integrate_all(&|t| norm2_sq(&self.value_at(t)));
        SignalStats { mean, l2_energy }
    }
}

fn check_vector(what: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidSignal(format!("{what} must be non-empty")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidSignal(format!("{what} has a non-finite entry")));
    }
    Ok(())
}

/// `sup |sin θ|` for `θ` between `a` and `b`.
fn sup_abs_sin(a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    // first peak π/2 + kπ at or above lo
    let k = ((lo - FRAC_PI_2) / PI).ceil();
    if FRAC_PI_2 + k * PI <= hi {
        1.0
    } else {
        lo.sin().abs().max(hi.sin().abs())
    }
}

/// Mean and energy of a signal.
pub fn signal_stats(u: &ControlSignal) -> SignalStats {
    u.stats()
}

/// `‖u(t)‖_∞ ≤ 1` for every `t` in the horizon.
pub fn admissible(u: &ControlSignal) -> bool {
    u.sup_norm() <= 1.0
}

const GL_NODES: [f64; 7] = [
    0.0,
    0.405_845_151_377_397_2,
    -0.405_845_151_377_397_2,
    0.741_531_185_599_394_4,
    -0.741_531_185_599_394_4,
    0.949_107_912_342_758_5,
    -0.949_107_912_342_758_5,
];
const GL_WEIGHTS: [f64; 7] = [
    0.417_959_183_673_469_4,
    0.381_830_050_505_118_9,
    0.381_830_050_505_118_9,
    0.279_705_391_489_276_7,
    0.279_705_391_489_276_7,
    0.129_484_966_168_869_7,
    0.129_484_966_168_869_7,
];

fn gauss_legendre_7(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
    h * GL_NODES
        .iter()
        .zip(GL_WEIGHTS)
        .map(|(x, w)| w * f(c + h * x))
        .sum::<f64>()
}

fn adapt(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = (a + b) / 2.0;
    let left = gauss_legendre_7(f, a, m);
    let right = gauss_legendre_7(f, m, b);
    let halves = left + right;
    if depth == 0 || (halves - whole).abs() <= tol * halves.abs().max(1.0) {
        return halves;
    }
    adapt(f, a, m, left, tol, depth - 1) + adapt(f, m, b, right, tol, depth - 1)
}

/// Adaptive 7-point Gauss-Legendre quadrature of `f` over `[a, b]`.
///
/// Subdivides until two-halves and whole-interval estimates agree to
/// `rel_tol · max(1, |I|)`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let whole = gauss_legendre_7(&f, a, b);
    adapt(&f, a, b, whole, rel_tol, 40)
}

/// All `2^p` sign vectors in `{-1, +1}^p`. Vertex `k` has `-1` at every bit
/// set in `k`.
pub fn sign_vertices(p: usize, cap: usize) -> Result<Vec<Vec<f64>>> {
    if p > cap || p >= usize::BITS as usize {
        return Err(Error::FamilyTooLarge { p, cap });
    }
    Ok((0..1usize << p)
        .map(|k| (0..p).map(|j| if k >> j & 1 == 1 { -1.0 } else { 1.0 }).collect())
        .collect())
}

/// Named adversary families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryFamily {
    /// Full-amplitude constants, one per hypercube vertex.
    Constant,
    /// Unit-amplitude sinusoids at multiples of `2π / t_f`.
    Sinusoid,
    /// Seeded random piecewise-constant `±1` signals.
    Bangbang,
}

/// A catalog entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSignal {
    pub label: String,
    pub signal: ControlSignal,
}

/// Parameters for generating the adversary catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdversaryCatalog {
    pub families: Vec<AdversaryFamily>,
    /// Sinusoid angular frequencies, as multiples of `2π / t_f`.
    pub frequency_multipliers: Vec<f64>,
    pub bangbang_count: usize,
    pub bangbang_switches: usize,
    pub seed: u64,
    /// Largest `p` for which `2^p` vertices may be enumerated.
    pub max_p: usize,
}

impl Default for AdversaryCatalog {
    fn default() -> Self {
        AdversaryCatalog {
            families: vec![
                AdversaryFamily::Constant,
                AdversaryFamily::Sinusoid,
                AdversaryFamily::Bangbang,
            ],
            frequency_multipliers: vec![0.1, 0.5, 1.0, 2.0, 5.0, 10.0],
            bangbang_count: 8,
            bangbang_switches: 5,
            seed: 0,
            max_p: 20,
        }
    }
}

impl AdversaryCatalog {
    /// Every configured family, in order.
    pub fn generate(&self, p: usize, t_f: f64) -> Result<Vec<LabeledSignal>> {
        let mut out = Vec::new();
        for &family in &self.families {
            out.extend(adversary_family(family, p, t_f, self)?);
        }
        Ok(out)
    }
}

fn fmt_signs(v: &[f64]) -> String {
    let parts: Vec<&str> = v.iter().map(|&x| if x < 0.0 { "-1" } else { "+1" }).collect();
    parts.join(" ")
}

/// Deterministic adversary catalog for one family.
pub fn adversary_family(
    family: AdversaryFamily,
    p: usize,
    t_f: f64,
    params: &AdversaryCatalog,
) -> Result<Vec<LabeledSignal>> {
    if p == 0 {
        return Err(Error::NoLostActuators);
    }
    match family {
        AdversaryFamily::Constant => sign_vertices(p, params.max_p)?
            .into_iter()
            .map(|v| {
                Ok(LabeledSignal {
                    label: format!("const[{}]", fmt_signs(&v)),
                    signal: ControlSignal::constant(v, t_f)?,
                })
            })
            .collect(),
        AdversaryFamily::Sinusoid => params
            .frequency_multipliers
            .iter()
            .map(|&k| {
                Ok(LabeledSignal {
                    label: format!("sin[{k}]"),
                    signal: ControlSignal::sinusoid(vec![1.0; p], k * 2.0 * PI / t_f, 0.0, t_f)?,
                })
            })
            .collect(),
        AdversaryFamily::Bangbang => {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            (0..params.bangbang_count)
                .map(|i| {
                    let signal = random_bang_bang(&mut rng, p, params.bangbang_switches, t_f)?;
                    Ok(LabeledSignal {
                        label: format!("bangbang[{i}]"),
                        signal,
                    })
                })
                .collect()
        }
    }
}

/// Piecewise-constant `±1` signal with up to `switches` random switch times.
pub fn random_bang_bang(rng: &mut impl Rng, p: usize, switches: usize, t_f: f64) -> Result<ControlSignal> {
    let mut cuts: Vec<f64> = (0..switches).map(|_| rng.random::<f64>() * t_f).collect();
    cuts.sort_by(f64::total_cmp);
    let mut breakpoints = vec![0.0];
    breakpoints.extend(cuts.into_iter().filter(|&c| c > 0.0 && c < t_f));
    breakpoints.push(t_f);
    breakpoints.dedup();
    let values = (1..breakpoints.len())
        .map(|_| (0..p).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect())
        .collect();
    ControlSignal::piecewise(breakpoints, values, t_f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_examples() {
        let c = ControlSignal::constant(vec![0.5, -0.5], 10.0).unwrap();
        let s = signal_stats(&c);
        assert_eq!(s.mean, vec![0.5, -0.5]);
        assert_eq!(s.l2_energy, 5.0);

        let sn = ControlSignal::sinusoid(vec![1.0], 2.0 * PI, 0.0, 1.0).unwrap();
        let s = signal_stats(&sn);
        assert!(s.mean[0].abs() < 1e-15);
        assert!((s.l2_energy - 0.5).abs() < 1e-15);

        let pw = ControlSignal::piecewise(vec![0.0, 1.0, 2.0], vec![vec![1.0], vec![-1.0]], 2.0).unwrap();
        let s = signal_stats(&pw);
        assert_eq!(s.mean, vec![0.0]);
        assert_eq!(s.l2_energy, 2.0);
    }

    #[test]
    fn admissibility_examples() {
        assert!(admissible(&ControlSignal::constant(vec![1.0, -1.0], 1.0).unwrap()));
        assert!(!admissible(
            &ControlSignal::sinusoid(vec![1.2], 1.0, 0.0, 10.0).unwrap()
        ));
        let pw = ControlSignal::piecewise(vec![0.0, 0.3, 1.0], vec![vec![0.5, -1.0], vec![1.0, 0.0]], 1.0).unwrap();
        assert!(admissible(&pw));
        let pw = ControlSignal::piecewise(vec![0.0, 0.3, 1.0], vec![vec![0.5], vec![1.0001]], 1.0).unwrap();
        assert!(!admissible(&pw));
    }

    #[test]
    fn sinusoid_sup_uses_attained_range() {
        // sin on [0, 0.1] never reaches 1, so amplitude 1.2 is still admissible
        let s = ControlSignal::sinusoid(vec![1.2], 1.0, 0.0, 0.1).unwrap();
        assert!((s.sup_norm() - 1.2 * 0.1f64.sin()).abs() < 1e-15);
        assert!(admissible(&s));
        // phase shift places a peak inside the window
        let s = ControlSignal::sinusoid(vec![0.9], 1.0, 1.5, 0.2).unwrap();
        assert_eq!(s.sup_norm(), 0.9);
        // negative frequency
        let s = ControlSignal::sinusoid(vec![1.0], -1.0, 0.0, 2.0).unwrap();
        assert_eq!(s.sup_norm(), 1.0);
    }

    #[test]
    fn invalid_signals() {
        assert!(ControlSignal::constant(vec![], 1.0).is_err());
        assert!(ControlSignal::constant(vec![1.0], 0.0).is_err());
        assert!(ControlSignal::piecewise(vec![0.0, 2.0, 1.0, 3.0], vec![vec![1.0]; 3], 3.0).is_err());
        assert!(ControlSignal::piecewise(vec![0.0, 1.0], vec![vec![1.0]], 2.0).is_err());
        assert!(ControlSignal::piecewise(vec![0.5, 2.0], vec![vec![1.0]], 2.0).is_err());
        assert!(ControlSignal::piecewise(vec![0.0, 1.0, 2.0], vec![vec![1.0], vec![1.0, 2.0]], 2.0).is_err());
        assert!(ControlSignal::sinusoid(vec![1.0], f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn piecewise_value_and_integral() {
        let pw = ControlSignal::piecewise(vec![0.0, 1.0, 3.0], vec![vec![2.0], vec![-1.0]], 3.0).unwrap();
        assert_eq!(pw.value_at(0.5), vec![2.0]);
        assert_eq!(pw.value_at(1.0), vec![-1.0]);
        assert_eq!(pw.value_at(3.0), vec![-1.0]);
        assert_eq!(pw.integral(0.5), vec![1.0]);
        assert_eq!(pw.integral(2.0), vec![1.0]);
        assert_eq!(pw.integral(3.0), vec![0.0]);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let s = ControlSignal::sinusoid(vec![0.7, -0.3], 1.3, 0.4, 7.5).unwrap();
        let exact = s.stats();
        let quad = s.stats_by_quadrature(1e-12);
        assert!((exact.l2_energy - quad.l2_energy).abs() <= 1e-9 * exact.l2_energy);
        for (a, b) in exact.mean.iter().zip(&quad.mean) {
            assert!((a - b).abs() < 1e-10);
        }
        let pw = ControlSignal::piecewise(vec![0.0, 0.25, 2.0], vec![vec![1.0], vec![-0.5]], 2.0).unwrap();
        let (e, q) = (pw.stats(), pw.stats_by_quadrature(1e-12));
        assert!((e.l2_energy - q.l2_energy).abs() < 1e-12);
        assert!((e.mean[0] - q.mean[0]).abs() < 1e-12);
    }

    #[test]
    fn catalog_shapes() {
        let cfg = AdversaryCatalog::default();
        let c = adversary_family(AdversaryFamily::Constant, 1, 10.0, &cfg).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].signal, ControlSignal::constant(vec![1.0], 10.0).unwrap());
        assert_eq!(c[1].signal, ControlSignal::constant(vec![-1.0], 10.0).unwrap());

        let s = adversary_family(AdversaryFamily::Sinusoid, 1, 10.0, &cfg).unwrap();
        assert_eq!(s.len(), 6);
        assert!(s.iter().all(|l| admissible(&l.signal)));

        let c3 = adversary_family(AdversaryFamily::Constant, 3, 1.0, &cfg).unwrap();
        assert_eq!(c3.len(), 8);
    }

    #[test]
    fn bangbang_is_deterministic() {
        let cfg = AdversaryCatalog {
            seed: 7,
            ..Default::default()
        };
        let a = adversary_family(AdversaryFamily::Bangbang, 2, 10.0, &cfg).unwrap();
        let b = adversary_family(AdversaryFamily::Bangbang, 2, 10.0, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), cfg.bangbang_count);
        for l in &a {
            assert!(admissible(&l.signal));
            assert_eq!(l.signal.dim(), 2);
        }
        let other = adversary_family(
            AdversaryFamily::Bangbang,
            2,
            10.0,
            &AdversaryCatalog {
                seed: 8,
                ..Default::default()
            },
        )
        .unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn family_cap() {
        let cfg = AdversaryCatalog {
            max_p: 3,
            ..Default::default()
        };
        assert_eq!(
            adversary_family(AdversaryFamily::Constant, 4, 1.0, &cfg),
            Err(Error::FamilyTooLarge { p: 4, cap: 3 })
        );
        assert_eq!(sign_vertices(2, 20).unwrap().len(), 4);
    }

    #[test]
    fn serde_tagged() {
        let s = ControlSignal::sinusoid(vec![1.0], 2.0, 0.0, 3.0).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(
            j,
            r#"{"horizon":3.0,"kind":"sinusoid","amplitude":[1.0],"omega":2.0,"phase":0.0}"#
        );
        assert_eq!(serde_json::from_str::<ControlSignal>(&j).unwrap(), s);
        let bad = r#"{"horizon":2.0,"kind":"piecewise_constant","breakpoints":[0.0,3.0],"values":[[1.0]]}"#;
        assert!(serde_json::from_str::<ControlSignal>(bad).is_err());
    }
}
