//! Small dense real-matrix kernel.
//!
//! [`Matrix`] is a validated wrapper around a heap-allocated `nalgebra`
//! matrix. Everything the analysis needs from linear algebra lives here: the
//! Moore-Penrose pseudoinverse (SVD with a relative rank cutoff), the
//! symmetric eigendecomposition with a reproducible ordering and sign
//! convention, and the 1 / infinity / spectral norms.
//!
//! Vectors are plain `&[f64]` / `Vec<f64>` throughout the crate.

use std::fmt;

use nalgebra::{DMatrix, DVector, SVD};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative tolerance used to accept a matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Dense real matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct Matrix(DMatrix<f64>);

impl Matrix {
    /// Builds a matrix from row-major data.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadShape {
                rows,
                cols,
                expected: rows * cols,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Matrix(DMatrix::from_row_slice(rows, cols, &data)))
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * ncols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != ncols {
                return Err(Error::BadShape {
                    rows: rows.len(),
                    cols: ncols,
                    expected: ncols,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Matrix::new(rows.len(), ncols, data)
    }

    /// Column vector (`len × 1`).
    pub fn column_vector(v: &[f64]) -> Result<Self> {
        Matrix::new(v.len(), 1, v.to_vec())
    }

    pub fn identity(n: usize) -> Self {
        Matrix(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix(DMatrix::zeros(rows, cols))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Matrix(DMatrix::from_diagonal(&DVector::from_row_slice(d)))
    }

    /// Wraps an `nalgebra` matrix. Panics if an entry is not finite.
    pub fn from_nalgebra(m: DMatrix<f64>) -> Self {
        assert!(m.iter().all(|v| v.is_finite()), "non-finite matrix entry");
        Matrix(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix(self.0.transpose())
    }

    /// Matrix product. Panics on incompatible shapes.
    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.cols(),
            rhs.rows(),
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows(),
            self.cols(),
            rhs.rows(),
            rhs.cols()
        );
        Matrix(&self.0 * &rhs.0)
    }

    /// Matrix-vector product. Panics if `v.len() != self.cols()`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols(), v.len(), "mul_vec length mismatch");
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        Matrix(&self.0 - &rhs.0)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix(&self.0 * s)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.0.column(j).iter().copied().collect()
    }

    /// Columns `idx`, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        Matrix(self.0.select_columns(idx))
    }

    /// Row-major copy of the entries.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.0.is_empty() {
            return Vec::new();
        }
        let mut s: Vec<f64> = self.0.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Numerical rank with the same cutoff used by [`pseudoinverse`].
    pub fn rank(&self) -> usize {
        let s = self.singular_values();
        let cutoff = rank_cutoff(self.rows(), self.cols(), s.first().copied().unwrap_or(0.0));
        s.iter().filter(|&&v| v > cutoff).count()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{:?}", self.to_rows())
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        if rows.is_empty() || rows[0].is_empty() {
            return Err(serde::de::Error::custom(
                "matrix must have at least one row and one column",
            ));
        }
        Matrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

fn rank_cutoff(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

/// Moore-Penrose pseudoinverse.
///
/// Singular values at or below `max(rows, cols) * eps * sigma_max` are
/// treated as zero. A zero (or empty) `r × c` input yields the zero `c × r`
/// matrix.
pub fn pseudoinverse(a: &Matrix) -> Matrix {
    let (r, c) = (a.rows(), a.cols());
    if a.0.is_empty() || a.max_abs() == 0.0 {
        return Matrix::zeros(c, r);
    }
    let svd = SVD::new(a.0.clone(), true, true);
    let u = svd.u.as_ref().expect("U requested");
    let v_t = svd.v_t.as_ref().expect("V^T requested");
    let sigma_max = svd.singular_values.iter().fold(0.0_f64, |m, &s| m.max(s));
    let cutoff = rank_cutoff(r, c, sigma_max);

    let mut out = DMatrix::zeros(c, r);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            // out += v_k * u_k^T / s
            out += (v_t.row(k).transpose() * u.column(k).transpose()) / s;
        }
    }
    Matrix(out)
}

/// Eigendecomposition `S = V diag(λ) Vᵀ` of a symmetric matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricEigen {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: Matrix,
}

impl SymmetricEigen {
    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let v = &self.eigenvectors;
        let d = Matrix::from_diagonal(&self.eigenvalues);
        v.matmul(&d).matmul(&v.transpose())
    }
}

/// Symmetric eigendecomposition with eigenvalues sorted descending and each
/// eigenvector's first non-negligible entry made positive.
///
/// Eigenvalues in `(-1e-12 · max(1, max|S|), 0)` are clamped to zero.
pub fn symmetric_eigen(s: &Matrix) -> Result<SymmetricEigen> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch {
            what: "symmetric_eigen columns",
            expected: s.rows(),
            got: s.cols(),
        });
    }
    let n = s.rows();
    if n == 0 {
        return Ok(SymmetricEigen {
            eigenvalues: Vec::new(),
            eigenvectors: Matrix::zeros(0, 0),
        });
    }
    let scale = s.max_abs().max(1.0);
    let asym = (&s.0 - s.0.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NonSymmetric { asymmetry: asym });
    }
    let sym = (&s.0 + s.0.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let clamp = 1e-12 * scale;
    let eigenvalues = order
        .iter()
        .map(|&i| {
            let l = eig.eigenvalues[i];
            if l < 0.0 && l > -clamp {
                0.0
            } else {
                l
            }
        })
        .collect();

    let mut v = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        if let Some(first) = col.iter().find(|x| x.abs() > 1e-14) {
            if *first < 0.0 {
                col = -col;
            }
        }
        v.set_column(dst, &col);
    }
    Ok(SymmetricEigen {
        eigenvalues,
        eigenvectors: Matrix(v),
    })
}

/// Induced norms of a matrix (vector norms for a single column).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Norms {
    /// Maximum absolute column sum.
    pub one: f64,
    /// Maximum absolute row sum.
    pub inf: f64,
    /// Largest singular value.
    pub two: f64,
}

pub fn norms(a: &Matrix) -> Norms {
    let m = &a.0;
    let one = m
        .column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let inf = m
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let two = if a.cols() == 1 || a.rows() == 1 {
        m.norm()
    } else {
        a.singular_values().first().copied().unwrap_or(0.0)
    };
    Norms { one, inf, two }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn norm2_sq(v: &[f64]) -> f64 {
    dot(v, v)
}

pub fn norm2(v: &[f64]) -> f64 {
    norm2_sq(v).sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `a + s * b`, elementwise.
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn scaled(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| s * x).collect()
}
