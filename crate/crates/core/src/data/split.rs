//! Stratified train/test partitioning.

use rand::seq::SliceRandom;

use super::{rng, LabeledDataset};
use crate::error::{PceError, Result};

/// Per-class training count: `fraction * n` rounded half up, kept in `1..n`.
pub fn train_count(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64 + 0.5).floor() as usize).clamp(1, n - 1)
}

/// Shuffles each class with stream `class` of `seed`; both parts keep the
/// original column order.
pub fn split(ds: &LabeledDataset, train_fraction: f64, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(PceError::InvalidArgument(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..ds.classes() {
        let mut members: Vec<usize> = (0..ds.len()).filter(|&i| ds.labels[i] == class).collect();
        if members.len() < 2 {
            return Err(PceError::TooFewSamples {
                class,
                count: members.len(),
            });
        }
        members.shuffle(&mut rng::stream(seed, class as u64));
        let cut = train_count(train_fraction, members.len());
        train.extend_from_slice(&members[..cut]);
        test.extend_from_slice(&members[cut..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((subset(ds, &train, seed, "train")?, subset(ds, &test, seed, "test")?))
}

fn subset(ds: &LabeledDataset, idx: &[usize], seed: u64, part: &str) -> Result<LabeledDataset> {
    let mut out = LabeledDataset::new(
        ds.matrix.select_columns(idx)?,
        idx.iter().map(|&i| ds.labels[i]).collect(),
    )?;
    out.meta = ds.meta.clone();
    out.meta.insert("split".into(), format!("{part} seed={seed}"));
    Ok(out)
}
