//! Seed derivation for reproducible, order-independent randomness.
//!
//! Every random stream in the crate is a ChaCha8 generator whose 64-bit seed
//! is derived from a global seed and a stable label (a period name, a tablet
//! id). The derivation uses FNV-1a for the label and the SplitMix64 finalizer
//! for mixing, both fixed algorithms, so parallel workers and different
//! platforms agree on every stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 20_240_617;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |hash, &b| {
        (hash ^ u64::from(b)).wrapping_mul(FNV_PRIME)
    })
}

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(global: u64, label: &str) -> u64 {
    mix64(global ^ mix64(fnv1a64(label.as_bytes())))
}

pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn labelled_stream(global: u64, label: &str) -> ChaCha8Rng {
    stream(derive_seed(global, label))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x8594_4171_f739_67e8);
    }

    #[test]
    fn splitmix_reference_vector() {
        // First output of SplitMix64 seeded with 0.
        assert_eq!(mix64(0), 0xe220_a839_7b1d_cdaf);
    }

    #[test]
    fn labels_separate_streams() {
        assert_ne!(derive_seed(7, "Ur III"), derive_seed(7, "Old Akkadian"));
        assert_ne!(derive_seed(7, "Ur III"), derive_seed(8, "Ur III"));
        assert_eq!(derive_seed(7, "Ur III"), derive_seed(7, "Ur III"));
    }
}
