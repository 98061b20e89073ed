//! Reproducible random streams.
//!
//! Every stream is a ChaCha8 generator keyed by `(master_seed, cell, block)`
//! with a separate ChaCha stream id per purpose, so any Monte-Carlo block can
//! be regenerated in isolation and parallel workers never share state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream ids used by the simulator.
pub mod stream {
    pub const TRIAL: u64 = 0;
    pub const CODE: u64 = 1;
    pub const ORACLE: u64 = 2;
}

const DOMAIN_TAG: u64 = 0x7265_6369_7072_6f6b;

/// Derives the generator for one `(master_seed, cell, block, stream)` key.
pub fn derive(master_seed: u64, cell: u64, block: u64, stream_id: u64) -> SimRng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&cell.to_le_bytes());
    seed[16..24].copy_from_slice(&block.to_le_bytes());
    seed[24..32].copy_from_slice(&DOMAIN_TAG.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(stream_id);
    rng
}

/// Convenience generator for tests and one-off runs.
pub fn from_seed(seed: u64) -> SimRng {
    derive(seed, 0, 0, stream::TRIAL)
}

/// Folds a list of words into a single 64-bit key (splitmix64 finalizer).
pub fn mix(words: &[u64]) -> u64 {
    let mut h: u64 = 0x9e37_79b9_7f4a_7c15;
    for &w in words {
        h ^= w;
        h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
        h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h ^= h >> 31;
    }
    h
}
