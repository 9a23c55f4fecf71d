//! Seeded, stream-addressable random number generation.
//!
//! Every parallel work unit owns its own [`RngState`], identified by a
//! `(seed, stream)` pair. The generator is ChaCha8: the seed keys the cipher
//! and the stream selects one of its 2^64 independent nonce streams, so two
//! states with the same pair replay the same sequence on any thread.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `2^-53`, the spacing of the open-interval uniform grid.
const UNIT_SPACING: f64 = 1.0 / (1u64 << 53) as f64;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream id for replication `replication` of cell `cell_id` under `base_seed`.
///
/// `mix64(mix64(base_seed ^ mix64(cell_id)) ^ replication)`. The mapping is
/// fixed: changing it changes every published result.
pub fn derive_stream(base_seed: u64, cell_id: u64, replication: u64) -> u64 {
    mix64(mix64(base_seed ^ mix64(cell_id)) ^ replication)
}

#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    /// State for one replication of one Monte Carlo cell.
    pub fn for_replication(base_seed: u64, cell_id: u64, replication: u64) -> Self {
        Self::new(base_seed, derive_stream(base_seed, cell_id, replication))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Number of 32-bit words consumed so far.
    pub fn word_pos(&self) -> u128 {
        self.inner.get_word_pos()
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw on the open interval (0, 1).
    ///
    /// Values are `(j + 1/2) * 2^-52` for `j` in `[0, 2^52)`, so both `u` and
    /// `1 - u` are exact and neither endpoint is ever returned.
    #[inline]
    pub fn open01(&mut self) -> f64 {
        (((self.next_u64() >> 12) << 1 | 1) as f64) * UNIT_SPACING
    }

    /// Uniform index in `[0, bound)`; `bound` must be positive.
    #[inline]
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize
    }
}
