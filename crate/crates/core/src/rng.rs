//! Seeding and sampling helpers.
//!
//! Every stochastic routine takes a `u64` seed and builds its own
//! [`ChaCha8Rng`] from it, so results never depend on scheduling. Replica `i`
//! of an experiment with base seed `b` uses [`derive_seed`]`(b, i)`.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function. A bijection on `u64`.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replica `i` under `base`: `splitmix64(base + (i + 1)·γ)` with
/// γ = 0x9E3779B97F4A7C15 and wrapping arithmetic.
///
/// For a fixed base this is injective in `i`, since γ is odd.
pub fn derive_seed(base: u64, i: u64) -> u64 {
    splitmix64(base.wrapping_add(i.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Exponential variate with the given rate, by inversion: `-ln(1-U)/rate`.
#[inline]
pub fn exp_sample(rng: &mut Rng, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -(-u).ln_1p() / rate
}

/// Uniform `f64` in [0, 1).
#[inline]
pub fn uniform(rng: &mut Rng) -> f64 {
    rng.random()
}

/// Uniform integer in `0..n`. `n` must be positive.
#[inline]
pub fn below(rng: &mut Rng, n: usize) -> usize {
    rng.random_range(0..n)
}
