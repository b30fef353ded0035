//! Reproducible random streams.
//!
//! Generator: ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`). The 64-bit
//! seed is expanded to a 256-bit key by `SeedableRng::seed_from_u64`, and the
//! stream id selects ChaCha's 64-bit stream nonce, so every `(seed, stream_id)`
//! pair names an independent, platform-independent sequence.
//!
//! Derived variates, frozen:
//! - uniform: top 53 bits of `next_u64`, scaled by 2^-53, in [0, 1).
//! - rademacher: one bit per draw, consumed least-significant first from a
//!   buffered `next_u64` word; bit 1 means −1.
//! - standard normal: Marsaglia's polar method on two uniforms mapped to
//!   (−1, 1); the second variate of each accepted pair is cached and returned
//!   by the next call.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::SignVector;

/// Monte Carlo chunk `c` uses stream `c`. Other consumers of a seed draw from
/// reserved streams in the upper half so they never overlap a chunk.
pub const CONSTRUCTION_STREAM: u64 = 1 << 63;
pub const TRIPLE_SAMPLING_STREAM: u64 = (1 << 63) + 1;

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
    bit_buf: u64,
    bits_left: u32,
    spare_normal: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
            bit_buf: 0,
            bits_left: 0,
            spare_normal: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_NEG_53
    }

    /// Uniform integer in `0..bound` by rejection (no modulo bias).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }

    #[inline]
    pub fn rademacher(&mut self) -> f64 {
        if self.bits_left == 0 {
            self.bit_buf = self.next_u64();
            self.bits_left = 64;
        }
        let bit = self.bit_buf & 1;
        self.bit_buf >>= 1;
        self.bits_left -= 1;
        if bit == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// Fills `out` with independent ±1 values.
    pub fn fill_rademacher(&mut self, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = self.rademacher());
    }

    /// A uniformly random vertex of {−1, 1}^n, n ≤ 64.
    pub fn sign_vector(&mut self, n: usize) -> SignVector {
        let mut bits = 0u64;
        for j in 0..n {
            if self.rademacher() < 0.0 {
                bits |= 1 << j;
            }
        }
        SignVector::new(bits, n).expect("bits fit by construction")
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let factor = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * factor);
                return u * factor;
            }
        }
    }
}
