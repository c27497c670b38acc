//! Synthetic samples drawn from a union of linear subspaces.

use nalgebra::DMatrix;

use super::rng::{self, StreamRng};
use super::LabeledDataset;
use crate::error::{PceError, Result};
use crate::matrix::DataMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisRule {
    /// All blocks are mutually orthogonal, so the subspaces are independent.
    IndependentOrthogonal,
    /// Each block is an independent random orthonormal basis.
    RandomGaussian,
}

impl BasisRule {
    pub fn name(self) -> &'static str {
        match self {
            BasisRule::IndependentOrthogonal => "independent-orthogonal",
            BasisRule::RandomGaussian => "random-gaussian",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "independent-orthogonal" => Some(BasisRule::IndependentOrthogonal),
            "random-gaussian" => Some(BasisRule::RandomGaussian),
            _ => None,
        }
    }
}

/// One class: `count` samples spanning a `dim`-dimensional subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubspaceBlock {
    pub dim: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSpec {
    pub ambient: usize,
    pub blocks: Vec<SubspaceBlock>,
    /// Coefficients are uniform in `[-coeff_scale, coeff_scale]`.
    pub coeff_scale: f64,
    pub basis_rule: BasisRule,
}

impl SubspaceSpec {
    /// `classes` blocks of identical shape with unit coefficient scale.
    pub fn uniform(ambient: usize, classes: usize, dim: usize, count: usize, basis_rule: BasisRule) -> Self {
        Self {
            ambient,
            blocks: vec![SubspaceBlock { dim, count }; classes],
            coeff_scale: 1.0,
            basis_rule,
        }
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    pub fn total_count(&self) -> usize {
        self.blocks.iter().map(|b| b.count).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(PceError::InfeasibleSpec(msg));
        if self.ambient == 0 {
            return fail("ambient dimension must be positive".into());
        }
        if self.blocks.is_empty() {
            return fail("at least one subspace is required".into());
        }
        if !(self.coeff_scale.is_finite() && self.coeff_scale > 0.0) {
            return fail(format!("coefficient scale must be positive, got {}", self.coeff_scale));
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if b.dim == 0 {
                return fail(format!("subspace {i} has dimension 0"));
            }
            if b.dim > self.ambient {
                return fail(format!(
                    "subspace {i} has dimension {} > ambient {}",
                    b.dim, self.ambient
                ));
            }
            if b.count < b.dim {
                return fail(format!("subspace {i} has {} samples for dimension {}", b.count, b.dim));
            }
        }
        if self.basis_rule == BasisRule::IndependentOrthogonal && self.total_dim() > self.ambient {
            return fail(format!(
                "independent subspaces need sum of dimensions {} <= ambient {}",
                self.total_dim(),
                self.ambient
            ));
        }
        Ok(())
    }
}

/// Draws the bases from stream 0 and the coefficients of global column `j`
/// from stream `1 + j`.
pub fn generate_union_of_subspaces(spec: &SubspaceSpec, seed: u64) -> Result<LabeledDataset> {
    spec.validate()?;
    let m = spec.ambient;
    let total_dim = spec.total_dim();
    let mut basis_rng = rng::stream(seed, 0);
    let mut gaussian = DMatrix::zeros(m, total_dim);
    for c in 0..total_dim {
        for r in 0..m {
            gaussian[(r, c)] = rng::standard_normal(&mut basis_rng);
        }
    }
    let bases: Vec<DMatrix<f64>> = match spec.basis_rule {
        BasisRule::IndependentOrthogonal => {
            let q = gaussian.qr().q();
            let mut offset = 0;
            spec.blocks
                .iter()
                .map(|b| {
                    let block = q.columns(offset, b.dim).into_owned();
                    offset += b.dim;
                    block
                })
                .collect()
        }
        BasisRule::RandomGaussian => {
            let mut offset = 0;
            spec.blocks
                .iter()
                .map(|b| {
                    let block = gaussian.columns(offset, b.dim).into_owned().qr().q();
                    offset += b.dim;
                    block
                })
                .collect()
        }
    };

    let n = spec.total_count();
    let mut data = DMatrix::zeros(m, n);
    let mut labels = Vec::with_capacity(n);
    let mut col = 0;
    for (class, (block, basis)) in spec.blocks.iter().zip(&bases).enumerate() {
        for _ in 0..block.count {
            let mut coeff_rng: StreamRng = rng::stream(seed, 1 + col as u64);
            let coeffs = nalgebra::DVector::from_fn(block.dim, |_, _| {
                spec.coeff_scale * (2.0 * rng::uniform(&mut coeff_rng) - 1.0)
            });
            data.set_column(col, &(basis * coeffs));
            labels.push(class);
            col += 1;
        }
    }
    Ok(LabeledDataset::new(DataMatrix::new(data)?, labels)?
        .with_meta("source", "synthetic")
        .with_meta("basis", spec.basis_rule.name())
        .with_meta("seed", seed.to_string()))
}
