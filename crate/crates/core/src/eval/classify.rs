//! Nearest-neighbor classification and accuracy.

use crate::error::{PceError, Result};
use crate::matrix::DataMatrix;

/// Labels each test column with the label of its Euclidean-nearest training
/// column; equal distances resolve to the lower training index.
pub fn nn_classify(train: &DataMatrix, train_labels: &[usize], test: &DataMatrix) -> Result<Vec<usize>> {
    if train_labels.len() != train.cols() {
        return Err(PceError::LengthMismatch {
            left: train_labels.len(),
            right: train.cols(),
        });
    }
    if train.rows() != test.rows() {
        return Err(PceError::DimensionMismatch(format!(
            "train features have {} rows, test features have {}",
            train.rows(),
            test.rows()
        )));
    }
    let train_m = train.as_matrix();
    let test_m = test.as_matrix();
    Ok(test_m
        .column_iter()
        .map(|q| {
            let mut best = (f64::INFINITY, 0);
            for (j, t) in train_m.column_iter().enumerate() {
                let dist = (t - q).norm_squared();
                if dist < best.0 {
                    best = (dist, j);
                }
            }
            train_labels[best.1]
        })
        .collect())
}

/// Fraction of positions where `predicted` equals `truth`.
pub fn accuracy(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(PceError::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(PceError::InvalidArgument("accuracy of an empty prediction set".into()));
    }
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}
