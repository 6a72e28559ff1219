//! Seeded random streams.
//!
//! All randomness comes from ChaCha8 keyed by a `u64` base seed. Parallel
//! work is split by *stream*: worker (or trial) `k` draws from stream `k` of
//! the base seed, so results do not depend on how work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
