//! Seed derivation for independent random streams.
//!
//! Every stochastic step (a tree's bootstrap and feature draws, a repeat's
//! fold shuffle, a grid cell's forest) gets its own ChaCha8 stream whose seed
//! is derived from a base seed and a path of integers. Streams never depend
//! on scheduling, so results are identical for any thread count.
//!
//! The mixer is SplitMix64 folded over the path:
//!
//! ```text
//! h = splitmix64(seed)
//! for x in path: h = splitmix64(h ^ splitmix64(x + 0x9E3779B97F4A7C15))
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(seed), |h, &x| {
        splitmix64(h ^ splitmix64(x.wrapping_add(GOLDEN_GAMMA)))
    })
}

pub fn stream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}

/// FNV-1a, used to turn names (configuration tags) into stream path entries.
pub fn name_hash(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}
