//! Per-replication random streams.
//!
//! Replication `i` uses ChaCha12 keyed by `seed_from_u64(master_seed)` on
//! stream number `i`. ChaCha is counter-based, so streams are independent
//! and any replication can be regenerated on its own.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type StreamRng = ChaCha12Rng;

/// The RNG for one replication together with its index.
pub struct ReplicationStream<R = StreamRng> {
    pub index: u64,
    pub rng: R,
}

impl ReplicationStream<StreamRng> {
    pub fn new(master_seed: u64, index: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
        rng.set_stream(index);
        Self { index, rng }
    }
}
