//! Seeded randomness for measurement sampling.
//!
//! `RandomSource` wraps ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded through
//! `SeedableRng::seed_from_u64`. Each measurement draws exactly one `f64` in
//! `[0, 1)` via the `Standard` distribution (53 random mantissa bits), so a run
//! consumes one draw per sampled measurement and nothing else. The same seed
//! replays the same outcome sequence bit-for-bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Environment variable consulted when no seed is supplied explicitly.
pub const SEED_ENV: &str = "ICL_QPROTO_SEED";

#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    draws: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            seed,
            draws: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of uniform draws consumed so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Uniform sample in `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        self.draws += 1;
        self.rng.gen::<f64>()
    }
}

/// Reads the fallback seed from `ICL_QPROTO_SEED`, if set and parseable.
pub fn seed_from_env() -> Option<u64> {
    std::env::var(SEED_ENV).ok()?.trim().parse().ok()
}
