//! Seeded random streams.
//!
//! Every simulation takes a single master seed. Independent streams for
//! sessions (or attack trials) are derived by mixing the stream index into the
//! seed with SplitMix64, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream `index` of the family rooted at `master_seed`.
pub fn stream(master_seed: u64, index: u64) -> SimRng {
    let seed = mix64(mix64(master_seed) ^ mix64(index.wrapping_add(0x632B_E59B_D9B4_E019)));
    SimRng::seed_from_u64(seed)
}

/// Stream for a named purpose within one session, e.g. hash seeds vs channel.
pub fn substream(master_seed: u64, index: u64, purpose: u64) -> SimRng {
    stream(mix64(master_seed ^ purpose.rotate_left(17)), index)
}
