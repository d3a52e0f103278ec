//! Reproducible random sources.
//!
//! All experiments run on ChaCha8 ([`SimRng`]), seeded from a single `u64`.
//! Independent streams (per trial block, per density, per channel) are
//! obtained with [`derive_seed`], a SplitMix64 mix of the base seed and a
//! stream index, so results do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator behind every stochastic operation in this crate.
pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Seed for stream `stream` derived from `base`.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
