//! Deterministic randomness.
//!
//! Every random quantity in the crate flows from a caller-supplied 64-bit
//! seed through ChaCha12. Uniform and Gaussian variates and the shuffle are
//! implemented here directly on the raw 64-bit output stream, so results are
//! bit-for-bit reproducible across platforms and releases:
//!
//! * uniforms take the top 53 bits of `next_u64`,
//! * Gaussians use the Box-Muller transform of two uniforms,
//! * the shuffle is Fisher-Yates with rejection-sampled bounded integers,
//! * independent substreams come from `set_stream` / SplitMix64 mixing.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Seeded generator for one logical stream of randomness.
pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Independent substream `stream` of the generator keyed by `seed`.
///
/// ChaCha streams with the same key and different stream numbers never
/// overlap, which makes per-run and per-cell randomness independent while
/// everything still derives from one master seed.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 step, used to fold tag words into derived seeds.
fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `base` and a list of tag words.
pub fn mix_seed(base: u64, tags: &[u64]) -> u64 {
    let mut s = splitmix64(base);
    for &t in tags {
        s = splitmix64(s ^ t);
    }
    s
}

/// Uniform draw in [0, 1) from the top 53 bits of one `next_u64`.
pub fn uniform01(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in (0, 1]; safe as a logarithm argument.
fn uniform01_open(rng: &mut ChaCha12Rng) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One pair of independent standard normal draws (Box-Muller).
pub fn standard_normal_pair(rng: &mut ChaCha12Rng) -> (f64, f64) {
    let u1 = uniform01_open(rng);
    let u2 = uniform01(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = std::f64::consts::TAU * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Fill `out` with standard normal draws, consuming pairs in order.
pub fn fill_standard_normal(rng: &mut ChaCha12Rng, out: &mut [f64]) {
    let mut i = 0;
    while i + 1 < out.len() {
        let (a, b) = standard_normal_pair(rng);
        out[i] = a;
        out[i + 1] = b;
        i += 2;
    }
    if i < out.len() {
        out[i] = standard_normal_pair(rng).0;
    }
}

/// Unbiased draw from [0, bound) by rejection on the 64-bit stream.
fn bounded(rng: &mut ChaCha12Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let zone = (u64::MAX / bound) * bound;
    loop {
        let r = rng.next_u64();
        if r < zone {
            return r % bound;
        }
    }
}

/// In-place Fisher-Yates shuffle.
pub fn shuffle<T>(rng: &mut ChaCha12Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = bounded(rng, (i + 1) as u64) as usize;
        items.swap(i, j);
    }
}
