//! Seeded generators.
//!
//! Every random consumer takes a `(seed, stream)` pair. Streams are
//! independent ChaCha8 streams of the same key, so chunked or parallel work
//! can be split without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
