//! Fit-time measurements on generated data.

use std::fmt::Write as _;
use std::time::Instant;

use crate::data::rng::derive;
use crate::data::{add_gaussian_noise, generate_union_of_subspaces, BasisRule, SubspaceBlock, SubspaceSpec};
use crate::error::{PceError, Result};
use crate::pce::{fit_with, FitOptions};

const BENCH_CLASSES: usize = 8;
const BENCH_SUBSPACE_DIM: usize = 4;
const BENCH_NOISE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub m: usize,
    pub n: usize,
    /// Fastest of the timed repeats.
    pub fit_seconds: f64,
}

/// `m x n` union of eight 4-dimensional subspaces with light Gaussian noise.
pub fn bench_data(m: usize, n: usize, seed: u64) -> Result<crate::matrix::DataMatrix> {
    let min = BENCH_CLASSES * BENCH_SUBSPACE_DIM;
    if m < min || n < min {
        return Err(PceError::InvalidArgument(format!(
            "benchmark size {m}x{n} is too small (need m >= {min} and n >= {min})"
        )));
    }
    let blocks = (0..BENCH_CLASSES)
        .map(|c| SubspaceBlock {
            dim: BENCH_SUBSPACE_DIM,
            count: n / BENCH_CLASSES + usize::from(c < n % BENCH_CLASSES),
        })
        .collect();
    let spec = SubspaceSpec {
        ambient: m,
        blocks,
        coeff_scale: 1.0,
        basis_rule: BasisRule::IndependentOrthogonal,
    };
    let ds = generate_union_of_subspaces(&spec, derive(seed, 1))?;
    add_gaussian_noise(&ds.matrix, BENCH_NOISE, None, derive(seed, 2))
}

pub fn bench(sizes: &[(usize, usize)], lambda: f64, seed: u64, repeats: usize) -> Result<Vec<BenchRow>> {
    if repeats == 0 {
        return Err(PceError::InvalidArgument("repeats must be positive".into()));
    }
    let opts = FitOptions::with_lambda(lambda);
    let data = sizes
        .iter()
        .map(|&(m, n)| bench_data(m, n, seed))
        .collect::<Result<Vec<_>>>()?;
    // Untimed warm-up, then repeats interleaved across sizes so slow phases of
    // the machine hit every size alike.
    for d in &data {
        fit_with(d, &opts)?;
    }
    let mut best = vec![f64::INFINITY; data.len()];
    for _ in 0..repeats {
        for (d, best) in data.iter().zip(best.iter_mut()) {
            let started = Instant::now();
            fit_with(d, &opts)?;
            *best = best.min(started.elapsed().as_secs_f64());
        }
    }
    Ok(sizes
        .iter()
        .zip(best)
        .map(|(&(m, n), fit_seconds)| BenchRow { m, n, fit_seconds })
        .collect())
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("m,n,fit_seconds\n");
    for row in rows {
        let _ = writeln!(out, "{},{},{:?}", row.m, row.n, row.fit_seconds);
    }
    out
}

/// Parses `500,1000` (paired with `default_m`) or `256x500,256x1000`.
pub fn parse_sizes(text: &str, default_m: usize) -> Result<Vec<(usize, usize)>> {
    let bad = |item: &str| PceError::InvalidArgument(format!("invalid size `{item}` (expected n or mxn)"));
    text.split(',')
        .map(|item| {
            let item = item.trim();
            let (m, n) = match item.split_once('x') {
                Some((m, n)) => (m.trim().parse().map_err(|_| bad(item))?, n.trim()),
                None => (default_m, item),
            };
            let n: usize = n.parse().map_err(|_| bad(item))?;
            if m == 0 || n == 0 {
                return Err(bad(item));
            }
            Ok((m, n))
        })
        .collect()
}
