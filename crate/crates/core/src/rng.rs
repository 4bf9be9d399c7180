//! Reproducible random streams.
//!
//! Every random quantity is drawn from a ChaCha8 stream selected by a
//! 64-bit key derived from the master seed and the position of the
//! consumer in a tree (cell lineage, replication index, ...). Streams are
//! independent of scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child key `tag` of `parent`.
#[inline]
pub fn derive(parent: u64, tag: u64) -> u64 {
    splitmix64(parent ^ splitmix64(tag.wrapping_mul(GOLDEN).wrapping_add(1)))
}

/// The ChaCha8 stream `key` under master `seed`.
pub fn stream(seed: u64, key: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key);
    rng
}
