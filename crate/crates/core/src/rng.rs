//! Counter-based random streams.
//!
//! Every random quantity in an experiment is drawn from a ChaCha stream keyed
//! by `(experiment seed, replication index, role)`. Replications never share
//! generator state, so they can run in any order or in parallel and still
//! reproduce bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Distinct roles of the same key are independent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StreamRole {
    Path = 0,
    Ghost = 1,
    Signs = 2,
    Aux = 3,
}

pub fn stream(seed: u64, replication: u64, role: StreamRole) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&replication.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(role as u64);
    rng
}

/// Derives the 64-bit seed handed to replication `replication` of an
/// experiment (splitmix64 finaliser over the pair).
pub fn replication_seed(seed: u64, replication: u64) -> u64 {
    let mut z = seed
        .wrapping_add(replication.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
