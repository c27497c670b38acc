//! Principal coefficients embedding.
//!
//! Given data `D` (columns are samples) and a trade-off `lambda`, the model
//! keeps the `k` leading right singular vectors of `D`, where `k` minimizes
//! `r + lambda * sum_{i>r} sigma_i^2`. The self-expression matrix of the
//! recovered clean data is then `C = V_k V_k^T`, and the projection `Theta`
//! embeds that graph under the metric constraint `Theta^T D D^T Theta = I`.

use nalgebra::DMatrix;

use crate::error::{PceError, Result};
use crate::graph;
use crate::linalg::{skinny_svd, Ridge, SvdFactors};
use crate::matrix::DataMatrix;

/// Costs within this absolute distance of the minimum count as ties.
pub const COST_TIE_TOLERANCE: f64 = 1e-12;

/// Default guard for [`materialize_affinity`].
pub const DEFAULT_AFFINITY_CAP: usize = 20_000;

pub const DEFAULT_LAMBDA: f64 = 1.0;

/// Returns the `k` minimizing `k + lambda * sum_{i>k} sigma_i^2` over
/// `k = 0..=sigma.len()`, preferring the smallest `k` among ties.
pub fn estimate_dimension(sigma: &[f64], lambda: f64) -> Result<usize> {
    check_lambda(lambda)?;
    if sigma.is_empty() {
        return Err(PceError::EmptySpectrum);
    }
    for (i, &s) in sigma.iter().enumerate() {
        if !s.is_finite() || s < 0.0 {
            return Err(PceError::NotSorted { index: i });
        }
        if i > 0 && s > sigma[i - 1] + COST_TIE_TOLERANCE {
            return Err(PceError::NotSorted { index: i });
        }
    }
    // tail[r] = sum_{i >= r} sigma_i^2, accumulated from the small end.
    let mut tail = vec![0.0; sigma.len() + 1];
    for i in (0..sigma.len()).rev() {
        tail[i] = tail[i + 1] + sigma[i] * sigma[i];
    }
    let costs: Vec<f64> = (0..=sigma.len()).map(|r| r as f64 + lambda * tail[r]).collect();
    let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(costs.iter().position(|&c| c <= best + COST_TIE_TOLERANCE).unwrap_or(0))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(PceError::InvalidLambda(lambda))
    }
}

/// `C* = V_k V_k^T`, held in factored form.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFactor {
    vk: DMatrix<f64>,
}

impl CoefficientFactor {
    /// Wraps an `n x k` matrix with orthonormal columns.
    pub fn new(vk: DMatrix<f64>) -> Result<Self> {
        if vk.ncols() == 0 || vk.nrows() == 0 {
            return Err(PceError::EmptyMatrix {
                rows: vk.nrows(),
                cols: vk.ncols(),
            });
        }
        if vk.ncols() > vk.nrows() {
            return Err(PceError::BadK {
                k: vk.ncols(),
                rank: vk.nrows(),
            });
        }
        let defect = (vk.transpose() * &vk - DMatrix::identity(vk.ncols(), vk.ncols())).norm();
        if !defect.is_finite() || defect > 1e-8 {
            return Err(PceError::InvalidArgument(format!(
                "coefficient factor columns are not orthonormal (defect {defect:e})"
            )));
        }
        Ok(Self { vk })
    }

    pub fn vk(&self) -> &DMatrix<f64> {
        &self.vk
    }

    pub fn k(&self) -> usize {
        self.vk.ncols()
    }

    /// Number of samples `n`.
    pub fn n(&self) -> usize {
        self.vk.nrows()
    }
}

/// Builds the factored principal coefficients from an SVD.
pub fn principal_coefficients(svd: &SvdFactors, lambda: f64) -> Result<CoefficientFactor> {
    let k = estimate_dimension(svd.sigma(), lambda)?;
    if k == 0 {
        let s1 = svd.sigma()[0];
        return Err(PceError::DegenerateDimension {
            lambda,
            min_lambda: (1.0 / (s1 * s1)) * (1.0 + 1e-6),
        });
    }
    Ok(CoefficientFactor {
        vk: svd.v().columns(0, k).into_owned(),
    })
}

/// `vk * vk^T` as a dense `n x n` matrix, refused beyond `cap` samples.
pub fn materialize_affinity(factor: &CoefficientFactor, cap: usize) -> Result<DMatrix<f64>> {
    let n = factor.n();
    if n > cap {
        return Err(PceError::TooLarge { n, cap });
    }
    Ok(&factor.vk * factor.vk.transpose())
}

/// Low-rank part and residual of a data matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub clean: DataMatrix,
    pub error: DataMatrix,
}

/// Splits `d` into its rank-`k` truncation and the remainder.
pub fn recover_clean(d: &DataMatrix, svd: &SvdFactors, k: usize) -> Result<Recovery> {
    if d.shape() != (svd.rows(), svd.cols()) {
        return Err(PceError::DimensionMismatch(format!(
            "data is {:?} but factors describe {}x{}",
            d.shape(),
            svd.rows(),
            svd.cols()
        )));
    }
    if k == 0 || k > svd.rank() {
        return Err(PceError::BadK { k, rank: svd.rank() });
    }
    let clean = svd.truncated(k);
    let error = d.as_matrix() - &clean;
    Ok(Recovery {
        clean: DataMatrix::new(clean)?,
        error: DataMatrix::new(error)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub lambda: f64,
    /// Subtract the per-row training mean before fitting.
    pub center: bool,
    pub ridge: Ridge,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
            center: false,
            ridge: Ridge::Auto,
        }
    }
}

impl FitOptions {
    pub fn with_lambda(lambda: f64) -> Self {
        Self {
            lambda,
            ..Self::default()
        }
    }
}

/// A fitted projection `z = Theta^T (y - mean)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PceModel {
    pub lambda: f64,
    pub k: usize,
    /// `m x k` projection.
    pub theta: DMatrix<f64>,
    /// Every singular value of the training matrix, descending.
    pub spectrum: Vec<f64>,
    pub train_cols: usize,
    /// Present only when the model was fitted on centered data.
    pub mean: Option<Vec<f64>>,
}

impl PceModel {
    pub fn input_dim(&self) -> usize {
        self.theta.nrows()
    }

    pub fn transform(&self, y: &DataMatrix) -> Result<DataMatrix> {
        transform(self, y)
    }
}

/// Extra by-products of a fit, mostly useful for diagnostics.
#[derive(Debug, Clone)]
pub struct FitDetails {
    pub model: PceModel,
    pub svd: SvdFactors,
    pub factor: CoefficientFactor,
    /// All generalized eigenvalues of the embedding pencil, descending.
    pub pencil_values: Vec<f64>,
}

pub fn fit(d: &DataMatrix, lambda: f64) -> Result<PceModel> {
    fit_with(d, &FitOptions::with_lambda(lambda)).map(|details| details.model)
}

/// Skinny SVD, dimension estimate, principal coefficients, then graph
/// embedding with `m' = k`.
pub fn fit_with(d: &DataMatrix, opts: &FitOptions) -> Result<FitDetails> {
    check_lambda(opts.lambda)?;
    let (mean, centered);
    let data = if opts.center {
        let mu = d.row_means();
        centered = d.subtract_row_offsets(&mu)?;
        mean = Some(mu);
        &centered
    } else {
        mean = None;
        d
    };
    let svd = skinny_svd(data)?;
    let factor = principal_coefficients(&svd, opts.lambda)?;
    let k = factor.k();
    let affinity = graph::pce_graph(&factor);
    let embedding = graph::embed_with_svd(data, &svd, &affinity, k, opts.ridge)?;
    let model = PceModel {
        lambda: opts.lambda,
        k,
        theta: embedding.theta,
        spectrum: svd.spectrum(),
        train_cols: d.cols(),
        mean,
    };
    Ok(FitDetails {
        model,
        svd,
        factor,
        pencil_values: embedding.values,
    })
}

/// `Theta^T y`, after subtracting the stored mean if the model has one.
pub fn transform(model: &PceModel, y: &DataMatrix) -> Result<DataMatrix> {
    if y.rows() != model.input_dim() {
        return Err(PceError::DimensionMismatch(format!(
            "model expects {} rows, data is {}x{}",
            model.input_dim(),
            y.rows(),
            y.cols()
        )));
    }
    let z = match &model.mean {
        Some(mu) => model.theta.transpose() * y.subtract_row_offsets(mu)?.as_matrix(),
        None => model.theta.transpose() * y.as_matrix(),
    };
    DataMatrix::new(z)
}
