//! Deterministic seed splitting.
//!
//! Child seeds are pure functions of the root seed and a path of stream
//! indices, so parallel trials never share a generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the stream addressed by `path` under `root`.
pub fn child(root: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(root), |acc, &k| splitmix64(acc ^ splitmix64(k.wrapping_add(1))))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
