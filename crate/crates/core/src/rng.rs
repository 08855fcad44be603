//! Seeded random streams.
//!
//! Every random quantity in the crate comes from a ChaCha8 stream selected by
//! `(seed, stream)`. ChaCha is counter based, so a given pair yields the same
//! sequence on every platform and independent of how work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids reserved for pipeline construction.
pub(crate) const EMBEDDER_STREAM: u64 = 0x454d_4245;
pub(crate) const MATRIX_STREAM: u64 = 0x4d41_5452;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Independent generator for sample `index` of an experiment seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    stream_rng(derive_seed(seed, 0x5a4d_504c), index)
}

/// SplitMix64 finalizer over `seed + salt`; used to derive sub-seeds.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed.wrapping_add(salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
