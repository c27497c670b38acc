//! Affinity graphs and their linear graph embedding.

use nalgebra::{DMatrix, DVector};

use crate::error::{PceError, Result};
use crate::linalg::{generalized_eigs, generalized_eigs_low_rank, skinny_svd, Ridge, SvdFactors};
use crate::matrix::DataMatrix;
use crate::pce::CoefficientFactor;

/// Generalized eigenvalues at or below this are treated as zero.
pub const EIGENVALUE_FLOOR: f64 = 1e-8;

/// Sample-to-sample affinity.
#[derive(Debug, Clone, PartialEq)]
pub enum AffinityGraph {
    /// `A = vk vk^T`, never formed explicitly.
    PceFactored { vk: DMatrix<f64> },
    /// Column `i` holds the weights reconstructing sample `i` from its neighbors.
    LleWeights { weights: DMatrix<f64> },
}

impl AffinityGraph {
    pub fn n(&self) -> usize {
        match self {
            AffinityGraph::PceFactored { vk } => vk.nrows(),
            AffinityGraph::LleWeights { weights } => weights.nrows(),
        }
    }

    /// Dense `A`. Only intended for small graphs and tests.
    pub fn dense(&self) -> DMatrix<f64> {
        match self {
            AffinityGraph::PceFactored { vk } => vk * vk.transpose(),
            AffinityGraph::LleWeights { weights } => weights.clone(),
        }
    }
}

pub fn pce_graph(factor: &CoefficientFactor) -> AffinityGraph {
    AffinityGraph::PceFactored {
        vk: factor.vk().clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LleConfig {
    /// Neighborhood size.
    pub neighbors: usize,
    /// Local Gram regularizer, scaled by `trace(G) / neighbors`.
    pub reg: f64,
}

impl Default for LleConfig {
    fn default() -> Self {
        Self {
            neighbors: 5,
            reg: 1e-3,
        }
    }
}

/// Locally linear reconstruction weights over the `p` Euclidean nearest
/// neighbors of every column (distance ties go to the lower index).
pub fn lle_graph(d: &DataMatrix, cfg: &LleConfig) -> Result<AffinityGraph> {
    let n = d.cols();
    let p = cfg.neighbors;
    if p == 0 || p >= n {
        return Err(PceError::InvalidArgument(format!(
            "neighborhood size must satisfy 1 <= p < n, got p = {p}, n = {n}"
        )));
    }
    if !cfg.reg.is_finite() || cfg.reg < 0.0 {
        return Err(PceError::InvalidArgument(format!(
            "regularizer must be finite and nonnegative, got {}",
            cfg.reg
        )));
    }
    let x = d.as_matrix();
    let mut weights = DMatrix::zeros(n, n);
    for i in 0..n {
        let xi = x.column(i);
        let mut dist: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| ((x.column(j) - xi).norm_squared(), j))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let hood: Vec<usize> = dist[..p].iter().map(|&(_, j)| j).collect();

        let mut diffs = DMatrix::zeros(x.nrows(), p);
        for (a, &j) in hood.iter().enumerate() {
            diffs.set_column(a, &(x.column(j) - xi));
        }
        let mut gram = diffs.transpose() * &diffs;
        let trace = gram.trace();
        let shift = if trace > 0.0 {
            cfg.reg * trace / p as f64
        } else {
            cfg.reg
        };
        for a in 0..p {
            gram[(a, a)] += shift;
        }
        let scale = gram.diagonal().max();
        let chol = gram
            .cholesky()
            .filter(|c| c.l_dirty().diagonal().iter().all(|&l| l * l > 1e-12 * scale))
            .ok_or(PceError::DegenerateNeighborhood { column: i })?;
        let w = chol.solve(&DVector::from_element(p, 1.0));
        let total = w.sum();
        if !total.is_finite() || total.abs() < f64::EPSILON * w.amax().max(1.0) {
            return Err(PceError::DegenerateNeighborhood { column: i });
        }
        for (a, &j) in hood.iter().enumerate() {
            weights[(j, i)] = w[a] / total;
        }
    }
    Ok(AffinityGraph::LleWeights { weights })
}

/// Projection learned by [`embed`].
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    /// `m x dim`, with `theta^T (D D^T + ridge I) theta = I`.
    pub theta: DMatrix<f64>,
    /// Every generalized eigenvalue of the pencil on `range(D)`, descending.
    pub values: Vec<f64>,
    pub ridge: f64,
}

impl Embedding {
    /// Eigenvalues above [`EIGENVALUE_FLOOR`].
    pub fn significant(&self) -> usize {
        self.values.iter().filter(|&&v| v > EIGENVALUE_FLOOR).count()
    }
}

/// Maximizes `tr(Theta^T D (A + A^T - A A^T) D^T Theta)` subject to
/// `Theta^T D D^T Theta = I`.
pub fn embed(d: &DataMatrix, graph: &AffinityGraph, dim: usize, ridge: Ridge) -> Result<Embedding> {
    let svd = skinny_svd(d)?;
    embed_with_svd(d, &svd, graph, dim, ridge)
}

/// [`embed`] with a precomputed skinny SVD of `d`.
///
/// The pencil is expressed in the basis `U_r` of `range(D)`, where `D D^T`
/// becomes `diag(sigma^2)`; `Theta` always lies in that range, and the
/// complement only contributes zero eigenvalues.
pub fn embed_with_svd(
    d: &DataMatrix,
    svd: &SvdFactors,
    graph: &AffinityGraph,
    dim: usize,
    ridge: Ridge,
) -> Result<Embedding> {
    let n = d.cols();
    if svd.rows() != d.rows() || svd.cols() != n {
        return Err(PceError::DimensionMismatch(format!(
            "data is {:?} but factors describe {}x{}",
            d.shape(),
            svd.rows(),
            svd.cols()
        )));
    }
    if graph.n() != n {
        return Err(PceError::DimensionMismatch(format!(
            "graph has {} nodes, data has {n} columns",
            graph.n()
        )));
    }
    if dim == 0 {
        return Err(PceError::BadDim { dim, max: 0 });
    }

    // Coordinates of the samples in the U_r basis: Sigma_r V_r^T.
    let mut coords = svd.v().transpose();
    for (i, mut row) in coords.row_iter_mut().enumerate() {
        row *= svd.sigma()[i];
    }
    let squared: Vec<f64> = svd.sigma().iter().map(|s| s * s).collect();
    let eig = match graph {
        AffinityGraph::PceFactored { vk } => {
            if dim > vk.ncols() {
                return Err(PceError::BadDim { dim, max: vk.ncols() });
            }
            // L = B B^T has rank <= k, so only a k x k problem is solved.
            generalized_eigs_low_rank(&(&coords * vk), &squared, ridge)?
        }
        AffinityGraph::LleWeights { weights } => {
            let p = &coords * weights;
            let cross = &p * coords.transpose();
            let lhs = &cross + cross.transpose() - &p * p.transpose();
            let metric = DMatrix::from_diagonal(&DVector::from_vec(squared));
            generalized_eigs(&lhs, &metric, ridge)?
        }
    };
    let significant = eig.count_above(EIGENVALUE_FLOOR);
    if dim > significant {
        return Err(PceError::BadDim { dim, max: significant });
    }
    let theta = svd.u() * eig.vectors.columns(0, dim);
    Ok(Embedding {
        theta,
        values: eig.values,
        ridge: eig.ridge,
    })
}
