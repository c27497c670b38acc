//! Dimension and accuracy as functions of `lambda`.

use std::fmt::Write as _;

use crate::data::{self, LabeledDataset};
use crate::error::{PceError, Result};
use crate::eval::{accuracy, nn_classify};
use crate::linalg::skinny_svd;
use crate::matrix::DataMatrix;
use crate::pce::{estimate_dimension, fit};

/// Largest number of values a `start:stop:step` range may expand to.
const MAX_RANGE_LEN: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSplit {
    pub train_fraction: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    /// Estimated from the spectrum of the full data set.
    pub k: usize,
    /// Test accuracy of a model fitted on the training part; `None` without
    /// labels, or when `lambda` is too small to keep any dimension.
    pub accuracy: Option<f64>,
}

/// Accepts `1,3,5` or an inclusive range `start:stop:step`.
pub fn parse_lambda_list(text: &str) -> Result<Vec<f64>> {
    let bad = |what: &str| PceError::InvalidArgument(format!("invalid lambda list `{text}`: {what}"));
    let number = |s: &str| -> Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| bad(&format!("`{}` is not a number", s.trim())))?;
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(PceError::InvalidLambda(v))
        }
    };
    let text = text.trim();
    if text.is_empty() {
        return Err(bad("empty"));
    }
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if stop < start {
                return Err(bad("range end is below its start"));
            }
            let steps = ((stop - start) / step + 1e-9).floor();
            if steps >= MAX_RANGE_LEN as f64 {
                return Err(bad("range is too long"));
            }
            Ok((0..=steps as usize).map(|i| start + i as f64 * step).collect())
        }
        [_] => text.split(',').map(number).collect(),
        _ => Err(bad("expected a comma list or start:stop:step")),
    }
}

pub fn sweep(
    data: &DataMatrix,
    labels: Option<&[usize]>,
    lambdas: &[f64],
    split: Option<SweepSplit>,
) -> Result<Vec<SweepRow>> {
    if lambdas.is_empty() {
        return Err(PceError::InvalidArgument("at least one lambda is required".into()));
    }
    let svd = skinny_svd(data)?;
    let parts = match (labels, split) {
        (Some(labels), Some(s)) => {
            let ds = LabeledDataset::new(data.clone(), labels.to_vec())?;
            Some(data::split(&ds, s.train_fraction, s.seed)?)
        }
        _ => None,
    };
    lambdas
        .iter()
        .map(|&lambda| {
            let k = estimate_dimension(svd.sigma(), lambda)?;
            let accuracy = match &parts {
                Some((train, test)) => split_accuracy(train, test, lambda)?,
                None => None,
            };
            Ok(SweepRow { lambda, k, accuracy })
        })
        .collect()
}

fn split_accuracy(train: &LabeledDataset, test: &LabeledDataset, lambda: f64) -> Result<Option<f64>> {
    let model = match fit(&train.matrix, lambda) {
        Ok(model) => model,
        Err(PceError::DegenerateDimension { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let predicted = nn_classify(
        &model.transform(&train.matrix)?,
        &train.labels,
        &model.transform(&test.matrix)?,
    )?;
    accuracy(&predicted, &test.labels).map(Some)
}

/// Index of the first row whose `k` is smaller than its predecessor's, when
/// the rows are sorted by `lambda`.
pub fn first_decrease(rows: &[SweepRow]) -> Option<usize> {
    let mut order: Vec<&SweepRow> = rows.iter().collect();
    order.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    order.windows(2).position(|w| w[1].k < w[0].k).map(|i| i + 1)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("lambda,k,accuracy\n");
    for row in rows {
        let acc = row.accuracy.map(|a| format!("{a:?}")).unwrap_or_default();
        let _ = writeln!(out, "{:?},{},{}", row.lambda, row.k, acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_union_of_subspaces, BasisRule, SubspaceSpec};

    #[test]
    fn lambda_lists() {
        assert_eq!(parse_lambda_list("1,3,5").unwrap(), vec![1.0, 3.0, 5.0]);
        let range = parse_lambda_list("1:99:2").unwrap();
        assert_eq!(range.len(), 50);
        assert_eq!((range[0], range[49]), (1.0, 99.0));
        assert_eq!(parse_lambda_list("0.5").unwrap(), vec![0.5]);
        for bad in ["", "1,,2", "0", "-1", "5:1:1", "1:2", "1:9:0", "a"] {
            assert!(parse_lambda_list(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn k_is_nondecreasing() {
        let d = DataMatrix::from_row_major(2, 2, &[2.0, 0.0, 0.0, 0.1]).unwrap();
        let rows = sweep(&d, None, &[1.0, 3.0, 5.0, 200.0], None).unwrap();
        let ks: Vec<usize> = rows.iter().map(|r| r.k).collect();
        assert_eq!(ks, vec![1, 1, 1, 2]);
        assert_eq!(first_decrease(&rows), None);
        assert!(rows.iter().all(|r| r.accuracy.is_none()));
    }

    #[test]
    fn detects_decrease() {
        let row = |lambda, k| SweepRow {
            lambda,
            k,
            accuracy: None,
        };
        assert_eq!(first_decrease(&[row(1.0, 2), row(3.0, 1)]), Some(1));
        assert_eq!(first_decrease(&[row(3.0, 2), row(1.0, 1)]), None);
    }

    #[test]
    fn accuracy_with_labels() {
        let spec = SubspaceSpec::uniform(20, 3, 2, 10, BasisRule::IndependentOrthogonal);
        let ds = generate_union_of_subspaces(&spec, 4).unwrap();
        let split = SweepSplit {
            train_fraction: 0.5,
            seed: 1,
        };
        let rows = sweep(&ds.matrix, Some(&ds.labels), &[1e-6, 10.0], Some(split)).unwrap();
        assert_eq!(rows[0].accuracy, None);
        assert!(rows[1].accuracy.unwrap() > 0.9);
        let csv = sweep_csv(&rows);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("lambda,k,accuracy\n1e-6,0,\n"));
    }
}
