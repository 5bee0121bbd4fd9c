#![allow(dead_code)]

use enres_core::matkernel::Matrix;
use enres_core::sysmodel::{build_system, SystemModel};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::new(rows, cols, gaussian_vec(rng, rows * cols)).unwrap()
}

/// Random `n × (m + p)` system with `p` lost actuators at random positions.
/// `m ≥ n` keeps the controlled block full row rank almost surely.
pub fn random_system(rng: &mut impl Rng, n: usize, m: usize, p: usize) -> SystemModel {
    assert!(m >= n);
    loop {
        let b = gaussian_matrix(rng, n, m + p);
        let mut idx: Vec<usize> = (0..m + p).collect();
        idx.shuffle(rng);
        let lost = &idx[..p];
        if let Ok(sys) = build_system(b, lost) {
            if sys.controlled_rank() == n {
                return sys;
            }
        }
    }
}

/// Random system with `n ≤ 4`, `m + p ≤ 6`, `1 ≤ p ≤ max_p`.
pub fn random_small_system(rng: &mut impl Rng, max_p: usize) -> SystemModel {
    let n = rng.random_range(1..=4usize);
    let p = rng.random_range(1..=max_p.min(6 - n));
    let m = rng.random_range(n..=6 - p);
    random_system(rng, n, m, p)
}

pub fn random_x0(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v = gaussian_vec(rng, n);
        if v.iter().any(|x| x.abs() > 1e-3) {
            return v;
        }
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// The four Penrose residuals, each relative to the norm it is compared with.
pub fn penrose_residuals(a: &Matrix, x: &Matrix) -> [f64; 4] {
    let ax = a.matmul(x);
    let xa = x.matmul(a);
    let rel = |d: f64, s: f64| if s > 0.0 { d / s } else { d };
    let na = a.frobenius_norm();
    let nx = x.frobenius_norm();
    [
        rel(ax.matmul(a).sub(a).frobenius_norm(), na),
        rel(xa.matmul(x).sub(x).frobenius_norm(), nx),
        rel(ax.sub(&ax.transpose()).frobenius_norm(), ax.frobenius_norm()),
        rel(xa.sub(&xa.transpose()).frobenius_norm(), xa.frobenius_norm()),
    ]
}
