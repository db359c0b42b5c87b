//! Seed derivation for independent, reproducible random streams.
//!
//! Every (experiment seed, grid cell, stream role) combination maps to its
//! own 64-bit seed through a splitmix64 chain, and each seed drives a
//! counter-based ChaCha stream. Streams derived from distinct part lists are
//! independent for all practical purposes, and none of this depends on
//! thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash a list of parts into one stream seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut state = 0x243F_6A88_85A3_08D3; // pi digits, nothing up the sleeve
    for &part in parts {
        state = mix64(state ^ mix64(part));
    }
    state
}

/// The RNG used everywhere in this crate: counter-based, cheap to seed.
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_seed_is_order_sensitive() {
        assert_ne!(derive_seed(&[1, 2]), derive_seed(&[2, 1]));
        assert_ne!(derive_seed(&[0]), derive_seed(&[0, 0]));
        assert_eq!(derive_seed(&[7, 8, 9]), derive_seed(&[7, 8, 9]));
    }

    #[test]
    fn streams_from_equal_seeds_agree() {
        use rand::Rng;
        let mut a = stream(derive_seed(&[5, 6]));
        let mut b = stream(derive_seed(&[5, 6]));
        for _ in 0..16 {
            assert_eq!(a.random::<u64>(), b.random::<u64>());
        }
    }
}
