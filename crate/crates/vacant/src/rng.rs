//! Deterministic random streams.
//!
//! Every sampling routine takes its generator explicitly. Replicas derive
//! their generator from a `(seed, stream)` pair so results do not depend on
//! how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for stream `stream` of the master `seed`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generator for a sub-stream, used when one replica needs several independent sources.
pub fn substream(seed: u64, stream: u64, sub: u64) -> Rng {
    let mixed = seed ^ sub.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
    self::stream(mixed, stream)
}
