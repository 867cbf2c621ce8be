//! Deterministic per-item random streams.
//!
//! Every stream is ChaCha20 keyed by `master_seed` (expanded with
//! `SeedableRng::seed_from_u64`) and positioned on ChaCha stream number
//! `item_index`. Streams for different items never overlap, so a batch gives
//! the same per-item results whatever order or thread it is processed on.
//! Gaussian draws use `rand_distr::StandardNormal` (ziggurat) and uniform
//! draws use `Rng::random::<f64>()`; both are stable for the pinned versions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

pub const ALGORITHM: &str = "chacha20";

#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    item_index: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, item_index: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
        rng.set_stream(item_index);
        RngStream {
            master_seed,
            item_index,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn item_index(&self) -> u64 {
        self.item_index
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on `[lo, hi]` (returns `lo` when the range is a point).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn integer_in(&mut self, lo: u32, hi: u32) -> u32 {
        self.rng.random_range(lo..=hi)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn normal(&mut self, mean: f64, std: f64) -> f64 {
        mean + std * self.standard_normal()
    }
}
