//! Independent oracles for the closed forms.
//!
//! * [`min_energy_fixed_mean`] solves the minimum-energy problem over
//!   piecewise-constant signals with a prescribed mean by weighted projection
//!   onto the affine mean constraint.
//! * [`oracle_malfunctioning_energy`] discretises the controlled input into
//!   `k` pieces and solves the endpoint-constrained least-energy problem from
//!   its KKT system, using `B_c` directly (no pseudoinverse).
//! * [`adversary_search`] looks for hostile piecewise-constant inputs by
//!   random-restart coordinate ascent.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::energy::total_energy;
use crate::error::{Error, Result};
use crate::matkernel::{norm2_sq, Matrix};
use crate::signals::{AdversaryCatalog, ControlSignal};
use crate::sysmodel::{RegulationTask, SystemModel};

/// Minimum-energy problem over `pieces` uniform pieces on `[0, horizon]`
/// with mean constrained to `mean`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizedProgram {
    pub pieces: usize,
    pub horizon: f64,
    pub mean: Vec<f64>,
}

impl DiscretizedProgram {
    pub fn new(pieces: usize, horizon: f64, mean: Vec<f64>) -> Result<Self> {
        if pieces == 0 {
            return Err(Error::InvalidParameter("pieces must be >= 1".into()));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidParameter(format!("horizon must be > 0, got {horizon}")));
        }
        if mean.is_empty() || mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("mean must be a non-empty finite vector".into()));
        }
        Ok(DiscretizedProgram { pieces, horizon, mean })
    }

    /// Piece widths `t_f / k`.
    pub fn widths(&self) -> Vec<f64> {
        let k = self.pieces as f64;
        (0..self.pieces)
            .map(|i| self.horizon * (i + 1) as f64 / k - self.horizon * i as f64 / k)
            .collect()
    }
}

/// Minimiser of a [`DiscretizedProgram`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedMeanSolution {
    /// One value vector per piece.
    pub pieces: Vec<Vec<f64>>,
    /// `Σ w_i ‖z_i‖²`
    pub energy: f64,
    /// Largest deviation of any piece from the first one.
    pub spread: f64,
}

impl FixedMeanSolution {
    pub fn to_signal(&self, horizon: f64) -> Result<ControlSignal> {
        ControlSignal::uniform_pieces(self.pieces.clone(), horizon)
    }
}

fn piece_spread(pieces: &[Vec<f64>]) -> f64 {
    let first = &pieces[0];
    pieces
        .iter()
        .flat_map(|p| p.iter().zip(first).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max)
}

/// Solves `min Σ w_i ‖z_i‖²` subject to `(1/t_f) Σ w_i z_i = z̄`.
///
/// With `W = diag(w)` and `A = wᵀ / t_f` acting coordinatewise, the
/// minimiser is `z = W⁻¹Aᵀ (A W⁻¹ Aᵀ)⁻¹ z̄`.
pub fn min_energy_fixed_mean(prog: &DiscretizedProgram) -> FixedMeanSolution {
    let widths = prog.widths();
    let tf = prog.horizon;
    // A W⁻¹ Aᵀ = Σ (w_i / t_f)² / w_i
    let gram: f64 = widths.iter().map(|w| (w / tf) * (w / tf) / w).sum();
    let pieces: Vec<Vec<f64>> = widths
        .iter()
        .map(|w| {
            let gain = (w / tf) / w / gram;
            prog.mean.iter().map(|m| gain * m).collect()
        })
        .collect();
    let energy = widths.iter().zip(&pieces).map(|(w, z)| w * norm2_sq(z)).sum();
    let spread = piece_spread(&pieces);
    FixedMeanSolution { pieces, energy, spread }
}

/// Result of the discretised malfunctioning-energy oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleEnergy {
    pub pieces: usize,
    pub energy: f64,
    /// Controlled input value on each piece.
    pub control: Vec<Vec<f64>>,
    pub spread: f64,
}

/// Minimal controlled-input energy over `k`-piece signals subject to
/// `x(t_f) = 0`, for the given uncontrolled input.
pub fn oracle_malfunctioning_energy(
    sys: &SystemModel,
    task: &RegulationTask,
    u_uc: &ControlSignal,
    k: usize,
) -> Result<OracleEnergy> {
    task.check_against(sys)?;
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
    if k == 0 {
        return Err(Error::InvalidParameter("pieces must be >= 1".into()));
    }
    let (n, m) = (sys.n(), sys.m());
    let t_f = task.t_f;
    let h = t_f / k as f64;
    let bc = sys.b_c().as_nalgebra();
    let mean_uc = u_uc.stats().mean;

    // d = -x0 - t_f B_uc ū_uc
    let drift = sys.b_uc().mul_vec(&mean_uc);
    let d: Vec<f64> = task.x0.iter().zip(&drift).map(|(x, b)| -x - t_f * b).collect();

    let size = k * m + n;
    let mut kkt = DMatrix::<f64>::zeros(size, size);
    for i in 0..k * m {
        kkt[(i, i)] = 2.0 * h;
    }
    for piece in 0..k {
        for r in 0..n {
            for c in 0..m {
                let v = h * bc[(r, c)];
                kkt[(k * m + r, piece * m + c)] = v;
                kkt[(piece * m + c, k * m + r)] = v;
            }
        }
    }
    let mut rhs = DVector::<f64>::zeros(size);
    for r in 0..n {
        rhs[k * m + r] = d[r];
    }
    let rank = sys.controlled_rank();
    if rank < n {
        return Err(Error::RankDeficient { rank, n });
    }
    let sol = kkt.full_piv_lu().solve(&rhs).ok_or(Error::RankDeficient { rank, n })?;

    let control: Vec<Vec<f64>> = (0..k)
        .map(|piece| (0..m).map(|c| sol[piece * m + c]).collect())
        .collect();
    let energy = control.iter().map(|z| h * norm2_sq(z)).sum();
    let spread = piece_spread(&control);
    Ok(OracleEnergy {
        pieces: k,
        energy,
        control,
        spread,
    })
}

/// Options for [`adversary_search`].
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchOptions {
    /// Number of objective evaluations.
    pub budget: usize,
    /// Uniform pieces per candidate adversary.
    pub pieces: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: 500,
            pieces: 16,
            seed: 0,
        }
    }
}

/// Best adversary found by [`adversary_search`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub label: String,
    pub signal: ControlSignal,
    /// `E_M+` achieved by `signal`.
    pub value: f64,
    pub evaluations: usize,
    pub restarts: usize,
    pub budget: usize,
    pub pieces: usize,
    pub seed: u64,
}

/// Random-restart coordinate ascent on `E_M+` over `k`-piece adversaries
/// with values in `[-1, 1]`, seeded with the default catalog.
///
/// `E_M+` is convex in each piece value, so every coordinate step compares
/// the two endpoints `±1`. The candidate sequence does not depend on
/// `budget`, so a larger budget never finds a worse adversary.
pub fn adversary_search(sys: &SystemModel, task: &RegulationTask, opts: &SearchOptions) -> Result<SearchResult> {
    task.check_against(sys)?;
    let p = sys.p();
    if p == 0 {
        return Err(Error::NoLostActuators);
    }
    if opts.pieces == 0 {
        return Err(Error::InvalidParameter("pieces must be >= 1".into()));
    }
    let (x0, t_f) = (&task.x0, task.t_f);
    let catalog = AdversaryCatalog {
        seed: opts.seed,
        ..AdversaryCatalog::default()
    };
    let mut best: Option<(String, ControlSignal, f64)> = None;
    for entry in catalog.generate(p, t_f)? {
        let v = total_energy(sys, x0, t_f, &entry.signal);
        if best.as_ref().is_none_or(|b| v > b.2) {
            best = Some((entry.label, entry.signal, v));
        }
    }
    let (mut label, mut signal, mut value) = best.expect("catalog is never empty");

    let k = opts.pieces;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed_ad00);
    let mut evaluations = 0;
    let mut restarts = 0;
    let eval = |vals: &[Vec<f64>]| -> Result<f64> {
        let s = ControlSignal::uniform_pieces(vals.to_vec(), t_f)?;
        Ok(total_energy(sys, x0, t_f, &s))
    };

    'outer: while evaluations < opts.budget {
        restarts += 1;
        let mut vals: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..p).map(|_| rng.random_range(-1.0..=1.0)).collect())
            .collect();
        let mut current = eval(&vals)?;
        evaluations += 1;
        loop {
            let mut improved = false;
            for piece in 0..k {
                for j in 0..p {
                    let keep = vals[piece][j];
                    let mut best_here = (current, keep);
                    for cand in [-1.0, 1.0] {
                        if evaluations >= opts.budget {
                            break 'outer;
                        }
                        vals[piece][j] = cand;
                        let v = eval(&vals)?;
                        evaluations += 1;
                        if v > best_here.0 {
                            best_here = (v, cand);
                        }
                        if v > value {
                            value = v;
                            signal = ControlSignal::uniform_pieces(vals.clone(), t_f)?;
                            label = format!("search[restart {restarts}]");
                        }
                    }
                    vals[piece][j] = best_here.1;
                    if best_here.0 > current {
                        current = best_here.0;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
    Ok(SearchResult {
        label,
        signal,
        value,
        evaluations,
        restarts,
        budget: opts.budget,
        pieces: k,
        seed: opts.seed,
    })
}

/// A seeded random regulation instance for oracle audits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomInstance {
    pub seed: u64,
    pub system: SystemModel,
    pub x0: Vec<f64>,
    pub t_f: f64,
}

/// Random `n × cols` system with `p` lost actuators, Gaussian entries,
/// a Gaussian initial condition and `t_f` uniform in `[0.5, 10]`.
///
/// Draws are repeated until the controlled block has full row rank, so
/// `cols - p ≥ n` is required.
pub fn random_instance(seed: u64, n: usize, cols: usize, p: usize) -> Result<RandomInstance> {
    if n == 0 || p >= cols || cols - p < n {
        return Err(Error::InvalidParameter(format!(
            "random instance needs n >= 1 and cols - p >= n (n = {n}, cols = {cols}, p = {p})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let data: Vec<f64> = (0..n * cols).map(|_| rng.sample(StandardNormal)).collect();
        let mut idx: Vec<usize> = (0..cols).collect();
        idx.shuffle(&mut rng);
        let x0: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let t_f = rng.random_range(0.5..=10.0);
        let Ok(system) = SystemModel::new(Matrix::new(n, cols, data)?, &idx[..p]) else {
            continue;
        };
        if system.controlled_rank() == n && norm2_sq(&x0) > 1e-6 {
            return Ok(RandomInstance { seed, system, x0, t_f });
        }
    }
}

/// `count` seeded fixed-mean programs with up to 64 pieces, up to four
/// channels and horizons in `[0.01, 100]`.
pub fn random_programs(seed: u64, count: usize) -> Vec<DiscretizedProgram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.random_range(1..=64usize);
            let dim = rng.random_range(1..=4usize);
            let mean = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let horizon = rng.random_range(0.01..=100.0);
            DiscretizedProgram::new(k, horizon, mean).expect("valid by construction")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysmodel::build_system;
    use crate::worstcase::worst_case_energy_p1;

    #[test]
    fn fixed_mean_examples() {
        let s = min_energy_fixed_mean(&DiscretizedProgram::new(1, 1.0, vec![2.0]).unwrap());
        assert_eq!(s.pieces, vec![vec![2.0]]);
        assert!((s.energy - 4.0).abs() < 1e-14);

        let s = min_energy_fixed_mean(&DiscretizedProgram::new(10, 2.0, vec![1.0, -1.0]).unwrap());
        assert!(s.spread <= 1e-12);
        for z in &s.pieces {
            assert!((z[0] - 1.0).abs() < 1e-12 && (z[1] + 1.0).abs() < 1e-12);
        }
        assert!((s.energy - 4.0).abs() < 1e-12);
    }

    #[test]
    fn program_validation() {
        assert!(DiscretizedProgram::new(0, 1.0, vec![1.0]).is_err());
        assert!(DiscretizedProgram::new(1, 0.0, vec![1.0]).is_err());
        assert!(DiscretizedProgram::new(1, 1.0, vec![]).is_err());
    }

    fn ident_split() -> SystemModel {
        let b = Matrix::from_rows(&[[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]).unwrap();
        build_system(b, &[2]).unwrap()
    }

    #[test]
    fn oracle_examples() {
        let sys = ident_split();
        let task = RegulationTask::new(vec![1.0, 0.0], 1.0).unwrap();
        let zero = ControlSignal::zero(1, 1.0).unwrap();
        let o = oracle_malfunctioning_energy(&sys, &task, &zero, 4).unwrap();
        assert!((o.energy - 1.0).abs() < 1e-12);

        let task = RegulationTask::new(vec![1.0, 1.0], 1.0).unwrap();
        let one = ControlSignal::constant(vec![1.0], 1.0).unwrap();
        let o = oracle_malfunctioning_energy(&sys, &task, &one, 8).unwrap();
        assert!((o.energy - 5.0).abs() < 1e-12);
        assert!(o.spread < 1e-10);
    }

    #[test]
    fn oracle_rejects_rank_deficient_bc() {
        // B_c = [1 0; 0 0]ᵀ-ish: second state only moved by the lost column
        let b = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let sys = build_system(b, &[1]).unwrap();
        let task = RegulationTask::new(vec![1.0, 1.0], 1.0).unwrap();
        let zero = ControlSignal::zero(1, 1.0).unwrap();
        assert_eq!(
            oracle_malfunctioning_energy(&sys, &task, &zero, 3),
            Err(Error::RankDeficient { rank: 1, n: 2 })
        );
    }

    #[test]
    fn search_budget_zero_returns_catalog_best() {
        let sys = ident_split();
        let task = RegulationTask::new(vec![1.0, 1.0], 1.0).unwrap();
        let r = adversary_search(
            &sys,
            &task,
            &SearchOptions {
                budget: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.evaluations, 0);
        assert_eq!(r.label, "const[+1]");
        let exact = worst_case_energy_p1(&sys, &task.x0, 1.0).unwrap();
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn search_is_deterministic_and_monotone() {
        let b = Matrix::from_rows(&[[2.0, 1.0, 1.0], [0.2, -1.0, 1.0]]).unwrap();
        let sys = build_system(b, &[2]).unwrap();
        let task = RegulationTask::new(vec![3.0, -7.0], 10.0).unwrap();
        let run = |budget| {
            adversary_search(
                &sys,
                &task,
                &SearchOptions {
                    budget,
                    pieces: 16,
                    seed: 3,
                },
            )
            .unwrap()
        };
        assert_eq!(run(200), run(200));
        let mut last = f64::NEG_INFINITY;
        for budget in [0, 10, 50, 200, 500] {
            let v = run(budget).value;
            assert!(v >= last);
            last = v;
        }
        let exact = worst_case_energy_p1(&sys, &task.x0, 10.0).unwrap();
        assert!(last <= exact + 1e-9);
    }
}

#[cfg(test)]
mod generator_tests {
    use super::*;

    #[test]
    fn random_instances_are_reproducible() {
        let a = random_instance(11, 3, 5, 2).unwrap();
        let b = random_instance(11, 3, 5, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.system.p(), 2);
        assert_eq!(a.system.controlled_rank(), 3);
        assert!(random_instance(11, 3, 4, 2).is_err());
    }

    #[test]
    fn random_programs_are_reproducible() {
        assert_eq!(random_programs(4, 10), random_programs(4, 10));
        assert_eq!(random_programs(4, 10).len(), 10);
    }
}
