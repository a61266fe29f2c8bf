//! Seeded random streams.
//!
//! Every randomized routine draws from a ChaCha20 stream identified by a
//! `(seed, stream index)` pair. ChaCha20 is counter-based, so distinct
//! indices give independent streams and parallel work assigned to fixed
//! indices is reproducible regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type StreamRng = ChaCha20Rng;

/// Sub-stream `index` of `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
