//! Counter-based random streams.
//!
//! Every trajectory or noise run draws from its own ChaCha8 stream keyed by
//! `(master_seed, index)`, so results do not depend on which thread ran
//! which index, or in what order.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub type StreamRng = ChaCha8Rng;

/// Independent stream `index` of the generator seeded with `master_seed`.
pub fn stream_rng(master_seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw from the open interval `(0, 1)`.
pub fn uniform_open(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw from `(−1, 1)`.
pub fn uniform_symmetric(rng: &mut impl RngCore) -> f64 {
    2.0 * uniform_open(rng) - 1.0
}

/// Exponential waiting time with the given rate; infinite for rate 0.
pub fn exponential(rng: &mut impl RngCore, rate: f64) -> f64 {
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    -libm::log(uniform_open(rng)) / rate
}
