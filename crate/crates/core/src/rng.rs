//! Per-run random streams.
//!
//! Each run owns exactly one [`RngStream`], derived from the scenario's base
//! seed and the run index. Everything random in a run is drawn from it in a
//! fixed order, so a `(baseSeed, runIndex, config)` triple fully determines a
//! trajectory regardless of how runs are scheduled across threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replicate `run_index` of a scenario with `base_seed`.
pub fn derive_seed(base_seed: u64, run_index: u64) -> u64 {
    mix64(base_seed ^ mix64(run_index.wrapping_add(0x5EED)))
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(base_seed: u64, run_index: u64) -> Self {
        Self::from_seed_value(derive_seed(base_seed, run_index))
    }

    pub fn from_seed_value(seed: u64) -> Self {
        RngStream { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// The derived seed this stream was built from.
    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl RngCore for RngStream {
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
