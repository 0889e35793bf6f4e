//! Deterministic, splittable randomness.
//!
//! All stochastic code in this crate draws from ChaCha8 streams whose seeds
//! are derived from a master seed and a path of integer tags via a SplitMix64
//! chain. Two runs with the same master seed and tag path are bit-identical,
//! and distinct tag paths give independent streams regardless of scheduling,
//! which is what makes parallel experiments replayable.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
#[inline]
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derive a child seed from a master seed and a tag path.
///
/// The chain is order-sensitive, so `[a, b]` and `[b, a]` give unrelated
/// streams.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut s = splitmix64(master);
    for &tag in path {
        s = splitmix64(s ^ splitmix64(tag));
    }
    s
}

/// A ChaCha8 stream for the given master seed and tag path.
pub fn stream(master: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, path))
}
