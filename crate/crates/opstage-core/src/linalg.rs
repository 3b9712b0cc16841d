//! Minimal dense matrix support for the classifier.
//!
//! The systems solved here are small (the hidden width is a few tens of
//! columns), so a row-major `Vec<f64>` matrix with a Cholesky solve covers
//! everything the crate needs without pulling in a linear-algebra stack.

// The kernels below are written as index loops so they read like the
// formulas they implement.
#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math;

/// Row-major dense matrix of `f64`.
///
/// Serializes as nested arrays (one inner array per row).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<f64>>", try_from = "Vec<Vec<f64>>")]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            data.extend_from_slice(row);
        }
        Some(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c] = v;
    }

    /// Slice view of row `r`.
    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Matrix product `self * rhs`. Panics on a shape mismatch; callers
    /// validate shapes at their own API boundary.
    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }

    /// `self^T * diag(w) * self`, the weighted Gram matrix (symmetric).
    pub fn gram_weighted(&self, weights: &[f64]) -> DenseMatrix {
        assert_eq!(self.rows, weights.len(), "weight length mismatch");
        let k = self.cols;
        let mut out = DenseMatrix::zeros(k, k);
        for (i, &w) in weights.iter().enumerate() {
            let row = self.row(i);
            for s in 0..k {
                let ws = w * row[s];
                for t in s..k {
                    out.data[s * k + t] += ws * row[t];
                }
            }
        }
        for s in 0..k {
            for t in 0..s {
                out.data[s * k + t] = out.data[t * k + s];
            }
        }
        out
    }

    /// `self^T * diag(w) * rhs`.
    pub fn cross_weighted(&self, weights: &[f64], rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.rows, rhs.rows, "row count mismatch");
        assert_eq!(self.rows, weights.len(), "weight length mismatch");
        let mut out = DenseMatrix::zeros(self.cols, rhs.cols);
        for (i, &w) in weights.iter().enumerate() {
            let a = self.row(i);
            let b = rhs.row(i);
            for s in 0..self.cols {
                let ws = w * a[s];
                if ws == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[s * rhs.cols + j] += ws * b[j];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|v| v * v).sum())
    }
}

impl From<DenseMatrix> for Vec<Vec<f64>> {
    fn from(m: DenseMatrix) -> Self {
        (0..m.rows).map(|r| m.row(r).to_vec()).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for DenseMatrix {
    type Error = &'static str;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, Self::Error> {
        DenseMatrix::from_rows(&rows).ok_or("ragged matrix rows")
    }
}

/// Solves `m * x = rhs` for a symmetric positive-definite `m` via Cholesky
/// factorization. Returns `None` when `m` is not positive definite (or not
/// finite), which callers surface as a numeric failure.
pub fn cholesky_solve(m: &DenseMatrix, rhs: &DenseMatrix) -> Option<DenseMatrix> {
    assert_eq!(m.rows(), m.cols(), "cholesky needs a square matrix");
    assert_eq!(m.rows(), rhs.rows(), "rhs row count mismatch");
    let k = m.rows();

    // Lower-triangular factor L with m = L * L^T.
    let mut l = DenseMatrix::zeros(k, k);
    for j in 0..k {
        let mut d = m.get(j, j);
        for t in 0..j {
            d -= l.get(j, t) * l.get(j, t);
        }
        let positive = d.is_finite() && d > 0.0;
        if !positive {
            return None;
        }
        let ljj = math::sqrt(d);
        l.set(j, j, ljj);
        for i in (j + 1)..k {
            let mut s = m.get(i, j);
            for t in 0..j {
                s -= l.get(i, t) * l.get(j, t);
            }
            l.set(i, j, s / ljj);
        }
    }

    // Forward substitution L y = rhs, then back substitution L^T x = y,
    // one right-hand-side column at a time.
    let mut x = DenseMatrix::zeros(k, rhs.cols());
    for col in 0..rhs.cols() {
        let mut y = vec![0.0; k];
        for i in 0..k {
            let mut s = rhs.get(i, col);
            for t in 0..i {
                s -= l.get(i, t) * y[t];
            }
            y[i] = s / l.get(i, i);
        }
        for i in (0..k).rev() {
            let mut s = y[i];
            for t in (i + 1)..k {
                s -= l.get(t, i) * x.get(t, col);
            }
            x.set(i, col, s / l.get(i, i));
        }
    }
    Some(x)
}
