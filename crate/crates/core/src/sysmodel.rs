//! Driftless system `ẋ = B u` and its controlled / uncontrolled column split.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{pseudoinverse, Matrix};

/// Input matrix `B` split into controlled (`B_c`) and uncontrolled (`B_uc`)
/// columns. Both groups keep the original column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemModel {
    b: Matrix,
    lost_actuators: Vec<usize>,
    controlled_actuators: Vec<usize>,
    b_c: Matrix,
    b_uc: Matrix,
    b_pinv: Matrix,
    b_c_pinv: Matrix,
}

impl SystemModel {
    /// Splits `b` by the lost actuator indices (0-based column numbers).
    ///
    /// Requires `rank(B) = n` and at least one controlled actuator.
    pub fn new(b: Matrix, lost_actuators: &[usize]) -> Result<Self> {
        let total = b.cols();
        if b.rows() == 0 || total == 0 {
            return Err(Error::BadSplit("input matrix must be non-empty".into()));
        }
        let mut lost = lost_actuators.to_vec();
        lost.sort_unstable();
        for w in lost.windows(2) {
            if w[0] == w[1] {
                return Err(Error::BadSplit(format!("actuator {} listed twice", w[0])));
            }
        }
        if let Some(&bad) = lost.iter().find(|&&i| i >= total) {
            return Err(Error::BadSplit(format!(
                "actuator index {bad} out of range for {total} columns"
            )));
        }
        if lost.len() == total {
            return Err(Error::BadSplit("no controlled actuator remains".into()));
        }
        let n = b.rows();
        let rank = b.rank();
        if rank < n {
            return Err(Error::NotControllable { rank, n });
        }
        let controlled: Vec<usize> = (0..total).filter(|i| lost.binary_search(i).is_err()).collect();
        let b_c = b.select_columns(&controlled);
        let b_uc = b.select_columns(&lost);
        let b_pinv = pseudoinverse(&b);
        let b_c_pinv = pseudoinverse(&b_c);
        Ok(SystemModel {
            b,
            lost_actuators: lost,
            controlled_actuators: controlled,
            b_c,
            b_uc,
            b_pinv,
            b_c_pinv,
        })
    }

    /// State dimension `n`.
    pub fn n(&self) -> usize {
        self.b.rows()
    }

    /// Number of controlled actuators `m`.
    pub fn m(&self) -> usize {
        self.controlled_actuators.len()
    }

    /// Number of lost actuators `p`.
    pub fn p(&self) -> usize {
        self.lost_actuators.len()
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn b_c(&self) -> &Matrix {
        &self.b_c
    }

    pub fn b_uc(&self) -> &Matrix {
        &self.b_uc
    }

    /// `B†`
    pub fn b_pinv(&self) -> &Matrix {
        &self.b_pinv
    }

    /// `B_c†`
    pub fn b_c_pinv(&self) -> &Matrix {
        &self.b_c_pinv
    }

    pub fn lost_actuators(&self) -> &[usize] {
        &self.lost_actuators
    }

    pub fn controlled_actuators(&self) -> &[usize] {
        &self.controlled_actuators
    }

    /// Rebuilds `B` from the two column groups.
    pub fn reassemble(&self) -> Matrix {
        let n = self.n();
        let mut rows = vec![vec![0.0; self.m() + self.p()]; n];
        for (k, &j) in self.controlled_actuators.iter().enumerate() {
            for (i, row) in rows.iter_mut().enumerate() {
                row[j] = self.b_c.get(i, k);
            }
        }
        for (k, &j) in self.lost_actuators.iter().enumerate() {
            for (i, row) in rows.iter_mut().enumerate() {
                row[j] = self.b_uc.get(i, k);
            }
        }
        Matrix::from_rows(&rows).expect("reassembled rows are rectangular and finite")
    }

    /// Rank of `B_c`; malfunctioning regulation for every adversary needs it
    /// to equal `n`.
    pub fn controlled_rank(&self) -> usize {
        self.b_c.rank()
    }
}

/// Constructs a [`SystemModel`].
pub fn build_system(b: Matrix, lost_actuators: &[usize]) -> Result<SystemModel> {
    SystemModel::new(b, lost_actuators)
}

/// Finite-time regulation task: drive `x0 ≠ 0` to the origin at `t_f > 0`.
/// `radius` is the `R` of the resilience metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegulationTask {
    pub x0: Vec<f64>,
    pub t_f: f64,
    #[serde(default)]
    pub radius: f64,
}

impl RegulationTask {
    pub fn new(x0: Vec<f64>, t_f: f64) -> Result<Self> {
        let task = RegulationTask { x0, t_f, radius: 0.0 };
        task.validate()?;
        Ok(task)
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidTask(format!("radius must be >= 0, got {radius}")));
        }
        self.radius = radius;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidTask("x0 has a non-finite entry".into()));
        }
        if self.x0.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidTask("x0 must be non-zero".into()));
        }
        if !(self.t_f.is_finite() && self.t_f > 0.0) {
            return Err(Error::InvalidTask(format!("t_f must be > 0, got {}", self.t_f)));
        }
        Ok(())
    }

    pub(crate) fn check_against(&self, sys: &SystemModel) -> Result<()> {
        self.validate()?;
        if self.x0.len() != sys.n() {
            return Err(Error::DimensionMismatch {
                what: "x0",
                expected: sys.n(),
                got: self.x0.len(),
            });
        }
        Ok(())
    }
}

/// Input matrix of the underwater-robot example:
/// `[[2, 1, 1], [0.2, -1, 1]]`.
pub fn underwater_robot_b() -> Matrix {
    Matrix::from_rows(&[[2.0, 1.0, 1.0], [0.2, -1.0, 1.0]]).expect("static matrix")
}

/// Underwater robot with authority over the third thruster lost.
pub fn underwater_robot() -> SystemModel {
    SystemModel::new(underwater_robot_b(), &[2]).expect("robot model is controllable")
}
