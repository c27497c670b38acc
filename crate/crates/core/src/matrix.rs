//! Dense data matrix whose columns are samples.

use nalgebra::DMatrix;

use crate::error::{PceError, Result};

/// An `m x n` real matrix with finite entries; each column is one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    inner: DMatrix<f64>,
}

impl DataMatrix {
    /// Wraps a nalgebra matrix after checking shape and finiteness.
    pub fn new(inner: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = inner.shape();
        if rows == 0 || cols == 0 {
            return Err(PceError::EmptyMatrix { rows, cols });
        }
        for col in 0..cols {
            for row in 0..rows {
                if !inner[(row, col)].is_finite() {
                    return Err(PceError::NonFinite { row, col });
                }
            }
        }
        Ok(Self { inner })
    }

    pub fn from_row_major(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        let expected = rows.checked_mul(cols).unwrap_or(usize::MAX);
        if values.len() != expected {
            return Err(PceError::BadBufferLength {
                rows,
                cols,
                expected,
                found: values.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(rows, cols, values))
    }

    /// Builds a matrix whose columns are the given samples.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(PceError::DimensionMismatch(format!(
                "column of length {} among columns of length {rows}",
                bad.len()
            )));
        }
        Self::new(DMatrix::from_fn(rows, cols, |r, c| columns[c][r]))
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.inner[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let (rows, cols) = self.shape();
        let mut out = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                out.push(self.inner[(r, c)]);
            }
        }
        out
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        self.inner.column(col).iter().copied().collect()
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.cols()) {
            return Err(PceError::DimensionMismatch(format!(
                "column index {bad} out of range for {} columns",
                self.cols()
            )));
        }
        Self::new(self.inner.select_columns(indices))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Per-row mean over all columns.
    pub fn row_means(&self) -> Vec<f64> {
        let n = self.cols() as f64;
        self.inner.row_iter().map(|row| row.sum() / n).collect()
    }

    /// Returns a copy with `offset[row]` subtracted from every entry of that row.
    pub fn subtract_row_offsets(&self, offset: &[f64]) -> Result<Self> {
        if offset.len() != self.rows() {
            return Err(PceError::DimensionMismatch(format!(
                "offset of length {} for matrix with {} rows",
                offset.len(),
                self.rows()
            )));
        }
        let mut out = self.inner.clone();
        for (r, mut row) in out.row_iter_mut().enumerate() {
            row.add_scalar_mut(-offset[r]);
        }
        Self::new(out)
    }
}

impl TryFrom<DMatrix<f64>> for DataMatrix {
    type Error = PceError;

    fn try_from(value: DMatrix<f64>) -> Result<Self> {
        Self::new(value)
    }
}

impl AsRef<DMatrix<f64>> for DataMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.inner
    }
}
