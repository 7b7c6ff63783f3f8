//! Specialized max filtering algorithms, one per group family.
//!
//! Each routine runs in time close to linear in the signal size, instead of
//! the `O(|G| d)` cost of enumerating the group.

pub mod assignment;
pub mod complex;
pub mod cyclic;
pub mod orthogonal;
pub mod sorting;
pub mod window;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_len, Error, Result};
use crate::group;

pub use assignment::{max_weight_assignment, mf_column_permutation};
pub use complex::{mf_phase, mf_shift_conjugate};
pub use cyclic::{mf_cyclic, CyclicCorrelator};
pub use orthogonal::{mf_left_orthogonal, mf_orthogonal};
pub use sorting::{mf_patch_permutation, mf_sign_flips, mf_signed_permutation, mf_sort_permutation};
pub use window::mf_sliding_window;

/// A `rows x cols` real matrix stored row-major. Rows are coordinates,
/// columns are points or samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixSignal {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl MatrixSignal {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_len(rows * cols, data.len())?;
        check_finite("matrix signal", &data)?;
        Ok(MatrixSignal { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Reads a `2 x n` matrix as a complex signal `x_j = m[0][j] + i m[1][j]`.
    pub fn to_complex(&self) -> Result<ComplexVector> {
        if self.rows != 2 {
            return Err(Error::InvalidInput("complex view needs exactly two rows".into()));
        }
        Ok(ComplexVector::new(
            (0..self.cols).map(|c| Complex64::new(self.get(0, c), self.get(1, c))).collect(),
        ))
    }
}

/// A complex signal; `C^n` carries the real inner product `Re(x^* y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexVector(pub Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        ComplexVector(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Interleaved `(re, im)` representation used by the flat group actions.
    pub fn to_real(&self) -> Vec<f64> {
        group::from_complex(&self.0)
    }

    pub fn from_real(x: &[f64]) -> Result<Self> {
        if x.len() % 2 != 0 {
            return Err(Error::InvalidInput("odd length for interleaved complex data".into()));
        }
        Ok(ComplexVector(group::to_complex(x)))
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// A `channels x width x positions` tensor of sliding windows, stored slice
/// by slice: slice `a` is the `channels x width` block at window position `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowedTensor {
    channels: usize,
    width: usize,
    positions: usize,
    data: Vec<f64>,
}

impl WindowedTensor {
    pub fn new(channels: usize, width: usize, positions: usize, data: Vec<f64>) -> Result<Self> {
        if channels == 0 || width == 0 || positions == 0 {
            return Err(Error::InvalidInput("empty windowed tensor".into()));
        }
        check_len(channels * width * positions, data.len())?;
        check_finite("windowed tensor", &data)?;
        Ok(WindowedTensor { channels, width, positions, data })
    }

    pub fn zeros(channels: usize, width: usize, positions: usize) -> Self {
        WindowedTensor { channels, width, positions, data: vec![0.0; channels * width * positions] }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.width, self.positions)
    }

    pub fn slice_len(&self) -> usize {
        self.channels * self.width
    }

    pub fn slice(&self, a: usize) -> &[f64] {
        let b = self.slice_len();
        &self.data[a * b..(a + 1) * b]
    }

    pub fn slice_mut(&mut self, a: usize) -> &mut [f64] {
        let b = self.slice_len();
        &mut self.data[a * b..(a + 1) * b]
    }

    /// The `width`-long fiber of channel `ch` at position `a`.
    pub fn fiber(&self, ch: usize, a: usize) -> &[f64] {
        let start = a * self.slice_len() + ch * self.width;
        &self.data[start..start + self.width]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Slices carrying at least one nonzero entry.
    pub fn support_slices(&self) -> Vec<usize> {
        (0..self.positions)
            .filter(|&a| self.slice(a).iter().any(|&v| v != 0.0))
            .collect()
    }

    /// A template supported on slice `position` with the given contents.
    pub fn single_slice(
        channels: usize,
        width: usize,
        positions: usize,
        position: usize,
        contents: &[f64],
    ) -> Result<Self> {
        check_len(channels * width, contents.len())?;
        if position >= positions {
            return Err(Error::InvalidInput(format!("slice {position} out of range")));
        }
        let mut t = Self::zeros(channels, width, positions);
        t.slice_mut(position).copy_from_slice(contents);
        Ok(t)
    }
}
