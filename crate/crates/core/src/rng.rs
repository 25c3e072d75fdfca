//! Labelled random streams.
//!
//! A master seed fans out into independent sub-streams by label:
//!
//! ```text
//! key  = FNV-1a-64(label bytes)
//! seed = splitmix64(splitmix64(master) ^ key)
//! rng  = ChaCha8 seeded from `seed` (rand_chacha `seed_from_u64`)
//! ```
//!
//! Labels are plain strings such as `"build"`, `"bench/t=3/seed=2"`, or
//! `"pilot"`, so the stream tree can be re-derived in any language.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, label: &str) -> u64 {
    splitmix64(splitmix64(master) ^ fnv1a(label.as_bytes()))
}

pub fn stream(master: u64, label: &str) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, label))
}
