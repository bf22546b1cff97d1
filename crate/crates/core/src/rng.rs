//! Seeded random streams.
//!
//! Every sampler takes an explicit `u64` seed and derives its generator here,
//! so identical `(seed, parameters)` reproduce identical batches. Distinct
//! logical streams under one seed use ChaCha's stream counter.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type SimRng = ChaCha20Rng;

pub fn seeded(seed: u64) -> SimRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Generator for an independent stream under the same seed.
pub fn seeded_stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
