//! Benchmark fixtures shared by the criterion targets.

use enres_core::bruteforce::random_instance;
use enres_core::{Matrix, RegulationTask, SystemModel};

/// Deterministic dense `rows × cols` matrix with entries in `(-1, 1)`.
pub fn fixture_matrix(rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols)
        .map(|k| ((k as f64 + 1.0) * 0.754_877_666).fract() * 2.0 - 1.0)
        .collect();
    Matrix::new(rows, cols, data).expect("finite by construction")
}

/// Seeded random system with one lost actuator and its task.
pub fn fixture_system(n: usize, cols: usize) -> (SystemModel, RegulationTask) {
    let inst = random_instance(42, n, cols, 1).expect("cols - 1 >= n");
    let task = RegulationTask::new(inst.x0, inst.t_f).expect("valid by construction");
    (inst.system, task)
}
