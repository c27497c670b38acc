//! Additive Gaussian noise and random pixel replacement.

use rand::seq::index;

use super::rng;
use crate::error::{PceError, Result};
use crate::matrix::DataMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    /// `d + rho * n`, `n` standard normal, optionally clamped to `clip`.
    Gaussian { clip: Option<(f64, f64)> },
    /// A fraction `rho` of each column replaced by uniform draws in `[0, max of column]`.
    Pixel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub rho: f64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            NoiseKind::Gaussian { clip } => {
                check_positive_rho(self.rho)?;
                if let Some(range) = clip {
                    check_clip(range)?;
                }
            }
            NoiseKind::Pixel => check_fraction(self.rho)?,
        }
        Ok(())
    }

    pub fn apply(&self, d: &DataMatrix, seed: u64) -> Result<DataMatrix> {
        match self.kind {
            NoiseKind::Gaussian { clip } => add_gaussian_noise(d, self.rho, clip, seed),
            NoiseKind::Pixel => add_pixel_corruption(d, self.rho, seed),
        }
    }

    pub fn describe(&self) -> String {
        match self.kind {
            NoiseKind::Gaussian { clip: None } => format!("gaussian rho={}", self.rho),
            NoiseKind::Gaussian { clip: Some((lo, hi)) } => {
                format!("gaussian rho={} clip={lo},{hi}", self.rho)
            }
            NoiseKind::Pixel => format!("pixel rho={}", self.rho),
        }
    }
}

fn check_positive_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho > 0.0 {
        Ok(())
    } else {
        Err(PceError::InvalidArgument(format!("rho must be positive, got {rho}")))
    }
}

fn check_fraction(rho: f64) -> Result<()> {
    if rho > 0.0 && rho <= 1.0 {
        Ok(())
    } else {
        Err(PceError::InvalidArgument(format!("rho must lie in (0, 1], got {rho}")))
    }
}

fn check_clip((lo, hi): (f64, f64)) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(PceError::InvalidArgument(format!("invalid clip range ({lo}, {hi})")))
    }
}

/// Column `c` draws from stream `c` of `seed`.
pub fn add_gaussian_noise(d: &DataMatrix, rho: f64, clip: Option<(f64, f64)>, seed: u64) -> Result<DataMatrix> {
    check_positive_rho(rho)?;
    if let Some(range) = clip {
        check_clip(range)?;
    }
    let mut out = d.as_matrix().clone();
    for (c, mut col) in out.column_iter_mut().enumerate() {
        let mut rng = rng::stream(seed, c as u64);
        for x in col.iter_mut() {
            *x += rho * rng::standard_normal(&mut rng);
            if let Some((lo, hi)) = clip {
                *x = x.clamp(lo, hi);
            }
        }
    }
    DataMatrix::new(out)
}

/// Number of corrupted entries per column: `rho * m` rounded half up.
pub fn corrupted_count(rho: f64, m: usize) -> usize {
    ((rho * m as f64 + 0.5).floor() as usize).min(m)
}

pub fn add_pixel_corruption(d: &DataMatrix, rho: f64, seed: u64) -> Result<DataMatrix> {
    check_fraction(rho)?;
    let m = d.rows();
    let count = corrupted_count(rho, m);
    let mut out = d.as_matrix().clone();
    for (c, mut col) in out.column_iter_mut().enumerate() {
        let mut rng = rng::stream(seed, c as u64);
        let p_max = col.max();
        let (lo, hi) = (p_max.min(0.0), p_max.max(0.0));
        for row in index::sample(&mut rng, m, count) {
            col[row] = lo + (hi - lo) * rng::uniform(&mut rng);
        }
    }
    DataMatrix::new(out)
}
