//! Centered principal components (Eigenfaces) baseline.

use nalgebra::DMatrix;

use crate::error::{PceError, Result};
use crate::linalg::skinny_svd;
use crate::matrix::DataMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `m x dim`, orthonormal columns.
    pub projection: DMatrix<f64>,
}

/// Top `dim` left singular vectors of the column-centered data.
pub fn pca_fit(d: &DataMatrix, dim: usize) -> Result<PcaModel> {
    let max = d.rows().min(d.cols().saturating_sub(1));
    if dim == 0 || dim > max {
        return Err(PceError::BadDim { dim, max });
    }
    let mean = d.row_means();
    let centered = d.subtract_row_offsets(&mean)?;
    let svd = skinny_svd(&centered).map_err(|e| match e {
        PceError::ZeroMatrix => PceError::BadDim { dim, max: 0 },
        other => other,
    })?;
    if dim > svd.rank() {
        return Err(PceError::BadDim { dim, max: svd.rank() });
    }
    Ok(PcaModel {
        mean,
        projection: svd.u().columns(0, dim).into_owned(),
    })
}

pub fn pca_transform(model: &PcaModel, y: &DataMatrix) -> Result<DataMatrix> {
    if y.rows() != model.mean.len() {
        return Err(PceError::DimensionMismatch(format!(
            "PCA model expects {} rows, data has {}",
            model.mean.len(),
            y.rows()
        )));
    }
    DataMatrix::new(model.projection.transpose() * y.subtract_row_offsets(&model.mean)?.as_matrix())
}

impl PcaModel {
    pub fn transform(&self, y: &DataMatrix) -> Result<DataMatrix> {
        pca_transform(self, y)
    }

    /// Maps features back to the input space.
    pub fn reconstruct(&self, z: &DataMatrix) -> Result<DataMatrix> {
        let mut out = &self.projection * z.as_matrix();
        for (r, mut row) in out.row_iter_mut().enumerate() {
            row.add_scalar_mut(self.mean[r]);
        }
        DataMatrix::new(out)
    }
}
