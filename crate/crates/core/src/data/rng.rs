//! Seeded random streams.
//!
//! Every stream is ChaCha8 keyed by `seed_from_u64(seed)` with the ChaCha
//! stream id set to a caller-chosen index (column, class, ...). Draws are
//! therefore independent of evaluation order. Normal deviates use the basic
//! Box-Muller transform `sqrt(-2 ln u1) cos(2 pi u2)` with `u1` in `(0, 1]`,
//! one deviate per pair of uniforms.
//!
//! Pipelines that draw several independent things from one user seed
//! (data, noise, split) first pass it through [`derive`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Mixes `seed` with a purpose tag (SplitMix64 finalizer).
pub fn derive(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform in `[0, 1)`.
pub fn uniform(rng: &mut StreamRng) -> f64 {
    rng.random::<f64>()
}

pub fn standard_normal(rng: &mut StreamRng) -> f64 {
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
