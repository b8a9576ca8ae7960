//! Seed expansion.
//!
//! Every random stream in the laboratory is derived from one user-facing
//! `u64` seed. A stream is addressed by a `(seed, label)` pair and expanded
//! with the SplitMix64 finalizer:
//!
//! ```text
//! derive(seed, label) = mix(seed ^ mix(label + 0x9E3779B97F4A7C15))
//! ```
//!
//! Labels are small integers (run index, trial index, ...) so sub-streams can
//! be split further by applying `derive` again.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed of sub-stream `label` of `seed`.
pub fn derive(seed: u64, label: u64) -> u64 {
    mix(seed ^ mix(label.wrapping_add(GOLDEN)))
}

/// The generator used for every stream.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shorthand for `rng(derive(seed, label))`.
pub fn stream(seed: u64, label: u64) -> ChaCha8Rng {
    rng(derive(seed, label))
}
