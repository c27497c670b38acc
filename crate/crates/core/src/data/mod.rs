//! Labeled data sets: synthetic generation, corruption, splitting and file I/O.

use std::collections::BTreeMap;

use crate::error::{PceError, Result};
use crate::matrix::DataMatrix;

pub mod format;
pub mod noise;
pub mod rng;
pub mod split;
pub mod synth;

pub use format::{
    format_dataset, format_matrix, load_dataset, load_matrix, parse_dataset, parse_matrix, save_dataset, save_matrix,
    FormatError,
};
pub use noise::{add_gaussian_noise, add_pixel_corruption, NoiseKind, NoiseSpec};
pub use split::split;
pub use synth::{generate_union_of_subspaces, BasisRule, SubspaceBlock, SubspaceSpec};

/// A data matrix whose columns carry class labels `0..classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub matrix: DataMatrix,
    pub labels: Vec<usize>,
    /// Provenance notes (source, seed, corruption applied, ...).
    pub meta: BTreeMap<String, String>,
}

impl LabeledDataset {
    /// Checks that labels cover `0..s` without gaps and match the column count.
    pub fn new(matrix: DataMatrix, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != matrix.cols() {
            return Err(PceError::LengthMismatch {
                left: labels.len(),
                right: matrix.cols(),
            });
        }
        let classes = labels.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; classes];
        for &l in &labels {
            seen[l] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(PceError::InvalidArgument(format!(
                "class {missing} has no samples (labels must cover 0..{classes})"
            )));
        }
        Ok(Self {
            matrix,
            labels,
            meta: BTreeMap::new(),
        })
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }

    pub fn classes(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Same labels and metadata, different matrix of the same width.
    pub fn with_matrix(&self, matrix: DataMatrix) -> Result<Self> {
        if matrix.cols() != self.labels.len() {
            return Err(PceError::LengthMismatch {
                left: matrix.cols(),
                right: self.labels.len(),
            });
        }
        Ok(Self {
            matrix,
            labels: self.labels.clone(),
            meta: self.meta.clone(),
        })
    }
}
