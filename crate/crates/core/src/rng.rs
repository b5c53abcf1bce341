//! Seeded random streams.
//!
//! A run has one root seed. Every consumer (a repetition, a particle-count cell,
//! the truth-side measurement oracle) derives its own stream from that seed and a
//! list of integer labels, so repetitions can be replayed individually and in any
//! order. Streams are ChaCha8, which produces the same sequence on every platform.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Purpose labels mixed into derived stream ids.
pub mod purpose {
    pub const FILTER: u64 = 1;
    pub const TRUTH: u64 = 2;
    pub const VALIDATION: u64 = 3;
    pub const BOOTSTRAP: u64 = 4;
}

#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    /// Stream for the given labels, e.g. `[cell, repetition, attempt, purpose]`.
    pub fn derive(seed: u64, labels: &[u64]) -> Self {
        Self::new(seed, stream_id(labels))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        // 53 random mantissa bits
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Folds labels into a stream id with the splitmix64 finalizer.
pub fn stream_id(labels: &[u64]) -> u64 {
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for &label in labels {
        h = splitmix64(h ^ label.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
