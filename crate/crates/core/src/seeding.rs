//! Deterministic seed derivation. Every random stream in the crate is a
//! `ChaCha8Rng` keyed by a value mixed from the master seed and task coordinates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a list of words.
pub fn mix(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x6A09_E667_F3BC_C908u64, |acc, &w| splitmix64(acc ^ splitmix64(w)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream tags keeping per-trial subspaces disjoint.
pub mod stream {
    pub const BRANCH: u64 = 0xB1;
    pub const SAMPLE: u64 = 0x5A;
    pub const LEARNER: u64 = 0x1E;
    pub const TEST: u64 = 0x7E;
}
