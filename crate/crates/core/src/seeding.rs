//! Deterministic sub-stream derivation.
//!
//! Every random draw in the crate comes from a ChaCha stream keyed by a root
//! seed plus a short path of tags, so parallel or resumed work reproduces
//! exactly what a sequential run would have drawn.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a tag path into a single 64-bit key.
pub fn derive(seed: u64, path: &[u64]) -> u64 {
    let mut acc = mix(seed.wrapping_add(GOLDEN));
    for &tag in path {
        acc = mix(acc ^ mix(tag.wrapping_add(GOLDEN)));
    }
    acc
}

pub fn stream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, path))
}

/// Hashes a short ASCII label into a tag.
pub const fn tag(label: &str) -> u64 {
    let bytes = label.as_bytes();
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    let mut i = 0;
    while i < bytes.len() {
        h ^= bytes[i] as u64;
        h = h.wrapping_mul(0x0100_0000_01B3);
        i += 1;
    }
    h
}
