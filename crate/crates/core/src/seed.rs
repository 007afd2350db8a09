//! Stable seed derivation.
//!
//! Every random stream in the crate is keyed by a mixed seed rather than drawn
//! sequentially from a parent generator, so a stream depends only on its key
//! and not on how many streams were consumed before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive combination of a seed with one key.
pub fn mix_seed(seed: u64, key: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ key.rotate_left(17) ^ 0xA076_1D64_78BD_642F)
}

/// Folds a sequence of keys into `seed`.
pub fn derive_seed(seed: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(seed, |s, &k| mix_seed(s, k))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stable 64-bit key for a string tag (FNV-1a).
pub fn tag(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}
