//! Dense kernels: skinny SVD with numerical rank, and a symmetric-definite
//! generalized eigensolver with deterministic basis conventions.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{PceError, Result};
use crate::matrix::DataMatrix;

/// Singular values below `RANK_TOLERANCE_FACTOR * max(m, n) * sigma_1` are
/// treated as zero.
pub const RANK_TOLERANCE_FACTOR: f64 = 1e-12;

/// Inputs to the eigensolver must be symmetric to this (scaled) tolerance.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Eigenvalues closer than this (relative to `max(1, |largest|)`) share an
/// eigenspace and get a canonical basis.
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;

const AUTO_RIDGE_FACTOR: f64 = 1e-10;

/// Skinny SVD `D = U diag(sigma) V^T` truncated to the numerical rank.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    v: DMatrix<f64>,
    discarded: Vec<f64>,
}

impl SvdFactors {
    /// `m x r` left singular vectors.
    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// `n x r` right singular vectors.
    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// The `r` retained singular values, descending.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn rows(&self) -> usize {
        self.u.nrows()
    }

    pub fn cols(&self) -> usize {
        self.v.nrows()
    }

    /// All `min(m, n)` singular values, including those below the rank cutoff.
    pub fn spectrum(&self) -> Vec<f64> {
        self.sigma.iter().chain(&self.discarded).copied().collect()
    }

    /// Absolute cutoff used to decide the numerical rank.
    pub fn rank_cutoff(&self) -> f64 {
        rank_cutoff(self.rows(), self.cols(), self.sigma[0])
    }

    /// `U_k diag(sigma_1..sigma_k) V_k^T`.
    pub fn truncated(&self, k: usize) -> DMatrix<f64> {
        let k = k.min(self.rank());
        let mut scaled = self.u.columns(0, k).into_owned();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= self.sigma[j];
        }
        scaled * self.v.columns(0, k).transpose()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.truncated(self.rank())
    }
}

fn rank_cutoff(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    RANK_TOLERANCE_FACTOR * rows.max(cols) as f64 * sigma_max
}

/// Computes the skinny SVD of `d`.
///
/// Columns are ordered by descending singular value and each singular pair is
/// sign-fixed so the largest-magnitude entry of the left vector is positive.
pub fn skinny_svd(d: &DataMatrix) -> Result<SvdFactors> {
    if d.max_abs() == 0.0 {
        return Err(PceError::ZeroMatrix);
    }
    let (m, n) = d.shape();
    let x = d.as_matrix();
    let svd = faer::Mat::<f64>::from_fn(m, n, |i, j| x[(i, j)])
        .thin_svd()
        .map_err(|_| PceError::NotConverged)?;
    let (u_full, v_full) = (svd.U(), svd.V());
    let values: Vec<f64> = (0..svd.S().dim()).map(|i| svd.S()[i]).collect();
    if values.iter().any(|s| !s.is_finite()) {
        return Err(PceError::NotConverged);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let sigma_max = values[order[0]];
    if sigma_max <= 0.0 {
        return Err(PceError::ZeroMatrix);
    }
    let cutoff = rank_cutoff(m, n, sigma_max);
    let rank = order.iter().take_while(|&&i| values[i] > cutoff).count();

    let mut u = DMatrix::zeros(m, rank);
    let mut v = DMatrix::zeros(n, rank);
    for (j, &src) in order.iter().take(rank).enumerate() {
        let mut u_col = DVector::from_fn(m, |i, _| u_full[(i, src)]);
        let mut v_col = DVector::from_fn(n, |i, _| v_full[(i, src)]);
        if leading_sign(u_col.as_slice()) < 0.0 {
            u_col.neg_mut();
            v_col.neg_mut();
        }
        u.set_column(j, &u_col);
        v.set_column(j, &v_col);
    }
    let sigma = order[..rank].iter().map(|&i| values[i]).collect();
    let discarded = order[rank..].iter().map(|&i| values[i].max(0.0)).collect();
    Ok(SvdFactors { u, sigma, v, discarded })
}

/// Sign of the first largest-magnitude entry.
fn leading_sign(values: &[f64]) -> f64 {
    let mut best = 0.0_f64;
    for &x in values {
        if x.abs() > best.abs() {
            best = x;
        }
    }
    if best < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Diagonal shift added to the metric matrix of a generalized eigenproblem.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Ridge {
    /// Zero when the metric is nonsingular, else `1e-10 * trace / n`.
    #[default]
    Auto,
    Fixed(f64),
}

/// Solution of `L x = value (R + ridge I) x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedEigs {
    /// Descending eigenvalues.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, normalized so `X^T (R + ridge I) X = I`.
    pub vectors: DMatrix<f64>,
    /// The ridge actually applied.
    pub ridge: f64,
}

impl GeneralizedEigs {
    /// Number of eigenvalues strictly above `threshold`.
    pub fn count_above(&self, threshold: f64) -> usize {
        self.values.iter().filter(|&&v| v > threshold).count()
    }
}

/// Returns the `count` largest generalized eigenpairs of `(l, r + ridge I)`.
pub fn generalized_top_eigs(l: &DMatrix<f64>, r: &DMatrix<f64>, count: usize, ridge: Ridge) -> Result<GeneralizedEigs> {
    if count > l.nrows() {
        return Err(PceError::BadDim {
            dim: count,
            max: l.nrows(),
        });
    }
    let mut all = generalized_eigs(l, r, ridge)?;
    all.values.truncate(count);
    all.vectors = all.vectors.columns(0, count).into_owned();
    Ok(all)
}

/// Full generalized eigendecomposition of the symmetric-definite pencil
/// `(l, r + ridge I)`, solved by Cholesky whitening.
///
/// Ordering: descending eigenvalue. Inside a degenerate eigenspace the basis
/// is rotated onto the principal axes of its Euclidean Gram matrix and sorted
/// by ascending Euclidean norm; any remaining ties get the basis obtained by
/// projecting coordinate axes in index order. Each vector is then
/// sign-fixed so its largest-magnitude coordinate is positive.
pub fn generalized_eigs(l: &DMatrix<f64>, r: &DMatrix<f64>, ridge: Ridge) -> Result<GeneralizedEigs> {
    let n = l.nrows();
    if l.ncols() != n || r.shape() != l.shape() {
        return Err(PceError::DimensionMismatch(format!(
            "pencil matrices must be square and equal-sized, got {:?} and {:?}",
            l.shape(),
            r.shape()
        )));
    }
    if n == 0 {
        return Err(PceError::EmptyMatrix { rows: 0, cols: 0 });
    }
    if let Some((row, col)) = first_non_finite(l).or_else(|| first_non_finite(r)) {
        return Err(PceError::NonFinite { row, col });
    }
    check_symmetric(l, "l")?;
    check_symmetric(r, "r")?;
    let l = symmetrize(l);
    let r = symmetrize(r);

    let ridge = match ridge {
        Ridge::Fixed(eps) if eps.is_finite() && eps >= 0.0 => eps,
        Ridge::Fixed(eps) => return Err(PceError::BadRidge(eps)),
        Ridge::Auto => auto_ridge(&r),
    };
    let mut metric = r;
    for i in 0..n {
        metric[(i, i)] += ridge;
    }

    let not_pd = PceError::NotPositiveDefinite { ridge };
    let chol = Cholesky::new(metric.clone()).ok_or_else(|| not_pd.clone())?;
    let g = chol.l();
    let half = g.solve_lower_triangular(&l).ok_or_else(|| not_pd.clone())?;
    let whitened = g
        .solve_lower_triangular(&half.transpose())
        .ok_or_else(|| not_pd.clone())?;
    let eig = SymmetricEigen::try_new(symmetrize(&whitened), f64::EPSILON, 0).ok_or(PceError::NotConverged)?;
    let vectors = g.transpose().solve_upper_triangular(&eig.eigenvectors).ok_or(not_pd)?;

    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let (values, vectors) = canonical_order(values, vectors, &metric, |x| x.dot(&(&l * x)))?;
    Ok(GeneralizedEigs { values, vectors, ridge })
}

/// Eigenpairs of the low-rank pencil `(B B^T, diag(metric) + ridge I)`,
/// found from the `q x q` Gram matrix of the whitened `B` (`q = b.ncols()`).
///
/// Same ordering, canonical bases and signs as [`generalized_eigs`].
/// `values` lists all `r = b.nrows()` eigenvalues, the ones past the rank of
/// `B` being exactly zero, but `vectors` only holds the eigenvectors of the
/// nonzero ones.
pub fn generalized_eigs_low_rank(b: &DMatrix<f64>, metric: &[f64], ridge: Ridge) -> Result<GeneralizedEigs> {
    let r = b.nrows();
    if metric.len() != r {
        return Err(PceError::DimensionMismatch(format!(
            "factor has {r} rows but the metric has {} entries",
            metric.len()
        )));
    }
    if r == 0 {
        return Err(PceError::EmptyMatrix { rows: 0, cols: 0 });
    }
    if let Some((row, col)) = first_non_finite(b) {
        return Err(PceError::NonFinite { row, col });
    }
    if let Some(row) = metric.iter().position(|v| !v.is_finite()) {
        return Err(PceError::NonFinite { row, col: row });
    }
    let ridge = match ridge {
        Ridge::Fixed(eps) if eps.is_finite() && eps >= 0.0 => eps,
        Ridge::Fixed(eps) => return Err(PceError::BadRidge(eps)),
        Ridge::Auto => {
            let max = metric.iter().fold(0.0_f64, |acc, v| acc.max(*v));
            let min = metric.iter().fold(f64::INFINITY, |acc, v| acc.min(*v));
            if min > RANK_TOLERANCE_FACTOR * r as f64 * max {
                0.0
            } else {
                (AUTO_RIDGE_FACTOR * metric.iter().sum::<f64>() / r as f64).max(0.0)
            }
        }
    };
    let diag: Vec<f64> = metric.iter().map(|v| v + ridge).collect();
    if diag.iter().any(|&v| v <= 0.0) {
        return Err(PceError::NotPositiveDefinite { ridge });
    }
    let inv_sqrt: Vec<f64> = diag.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut whitened = b.clone();
    for (i, mut row) in whitened.row_iter_mut().enumerate() {
        row *= inv_sqrt[i];
    }
    let gram = whitened.transpose() * &whitened;
    let eig = SymmetricEigen::try_new(symmetrize(&gram), f64::EPSILON, 0).ok_or(PceError::NotConverged)?;
    let top = eig.eigenvalues.iter().fold(0.0_f64, |acc, v| acc.max(*v));
    let kept: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&j| eig.eigenvalues[j] > f64::EPSILON * gram.nrows() as f64 * top)
        .collect();
    let mut values = Vec::with_capacity(kept.len());
    let mut vectors = DMatrix::zeros(r, kept.len());
    for (c, &j) in kept.iter().enumerate() {
        let mu = eig.eigenvalues[j];
        let mut x = &whitened * eig.eigenvectors.column(j) / mu.sqrt();
        for (i, v) in x.iter_mut().enumerate() {
            *v *= inv_sqrt[i];
        }
        vectors.set_column(c, &x);
        values.push(mu);
    }
    let metric = DMatrix::from_diagonal(&DVector::from_vec(diag));
    let (mut values, vectors) = canonical_order(values, vectors, &metric, |x| (b.transpose() * x).norm_squared())?;
    values.resize(r, 0.0);
    Ok(GeneralizedEigs { values, vectors, ridge })
}

/// Sorts eigenpairs by descending value, canonicalizes degenerate
/// eigenspaces and fixes signs. `rayleigh(x)` is `x^T L x`.
fn canonical_order(
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    metric: &DMatrix<f64>,
    rayleigh: impl Fn(&DVector<f64>) -> f64,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut vectors = vectors.select_columns(&order);

    let scale = values.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[end - 1] - values[end]).abs() <= DEGENERACY_TOLERANCE * scale {
            end += 1;
        }
        if end - start > 1 {
            canonicalize_eigenspace(&mut vectors, start, end, metric)?;
            for j in start..end {
                values[j] = rayleigh(&vectors.column(j).into_owned());
            }
        }
        start = end;
    }
    for mut col in vectors.column_iter_mut() {
        if leading_sign(col.as_slice()) < 0.0 {
            col.neg_mut();
        }
    }
    Ok((values, vectors))
}

fn first_non_finite(a: &DMatrix<f64>) -> Option<(usize, usize)> {
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            if !a[(r, c)].is_finite() {
                return Some((r, c));
            }
        }
    }
    None
}

fn check_symmetric(a: &DMatrix<f64>, which: &'static str) -> Result<()> {
    let scale = a.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let mut worst = 0.0_f64;
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    if worst > SYMMETRY_TOLERANCE * scale {
        return Err(PceError::NotSymmetric {
            which,
            asymmetry: worst,
        });
    }
    Ok(())
}

fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

fn auto_ridge(r: &DMatrix<f64>) -> f64 {
    let n = r.nrows();
    let eigenvalues = r.symmetric_eigenvalues();
    let max = eigenvalues.iter().fold(0.0_f64, |acc, v| acc.max(*v));
    let min = eigenvalues.iter().fold(f64::INFINITY, |acc, v| acc.min(*v));
    if min > RANK_TOLERANCE_FACTOR * n as f64 * max {
        0.0
    } else {
        (AUTO_RIDGE_FACTOR * r.trace() / n as f64).max(0.0)
    }
}

/// Replaces columns `start..end` (a metric-orthonormal basis of one
/// eigenspace) by the canonical basis described on [`generalized_eigs`].
fn canonicalize_eigenspace(vectors: &mut DMatrix<f64>, start: usize, end: usize, metric: &DMatrix<f64>) -> Result<()> {
    let block = vectors.columns(start, end - start).into_owned();
    let gram = block.transpose() * &block;
    let eig = SymmetricEigen::try_new(gram, f64::EPSILON, 0).ok_or(PceError::NotConverged)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let norms: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let rotated = &block * eig.eigenvectors.select_columns(&order);

    let scale = norms.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let mut s = 0;
    while s < norms.len() {
        let mut e = s + 1;
        while e < norms.len() && (norms[e] - norms[e - 1]).abs() <= DEGENERACY_TOLERANCE * scale {
            e += 1;
        }
        let group = rotated.columns(s, e - s).into_owned();
        let basis = if e - s > 1 {
            coordinate_basis(&group, metric).unwrap_or(group)
        } else {
            group
        };
        vectors.columns_mut(start + s, e - s).copy_from(&basis);
        s = e;
    }
    Ok(())
}

/// Metric-orthonormal basis of `span(group)` built by projecting `e_0, e_1, ...`
/// in order and Gram-Schmidt orthogonalizing. `None` if it cannot fill the span.
fn coordinate_basis(group: &DMatrix<f64>, metric: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = group.nrows();
    let q = group.ncols();
    let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(q);
    for j in 0..n {
        if accepted.len() == q {
            break;
        }
        let mut p = group * (group.transpose() * metric.column(j));
        for _ in 0..2 {
            for a in &accepted {
                let coef = a.dot(&(metric * &p));
                p.axpy(-coef, a, 1.0);
            }
        }
        let norm = p.dot(&(metric * &p)).max(0.0).sqrt();
        if norm > 1e-6 * metric[(j, j)].max(0.0).sqrt() {
            accepted.push(p / norm);
        }
    }
    (accepted.len() == q).then(|| DMatrix::from_columns(&accepted))
}
