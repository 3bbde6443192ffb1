//! Seeded random streams.
//!
//! Every draw in the crate comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) keyed by a 64-bit
//! seed through `seed_from_u64`, with the stream id mapped onto ChaCha's native 64-bit stream
//! counter. ChaCha output is specified bit-for-bit, so a `(seed, stream)` pair reproduces the
//! same draws on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSource {
    pub seed: u64,
    pub stream: u64,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        RandomSource { seed, stream }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        RandomSource { stream, ..self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Draws an index from `weights` by inverse CDF on a single uniform.
pub fn sample_index<R: rand::Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random::<f64>();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
            acc += w;
            if u < acc {
                return i;
            }
        }
    }
    // rounding left u above the accumulated total
    last_positive
}
