//! Seeded randomness. All stochastic stages draw from [`ChaCha8Rng`], whose
//! output stream is fixed by the seed on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Seed for the `attempt`-th retry of a stage.
    pub fn offset(self, attempt: u64) -> RngSeed {
        RngSeed(self.0.wrapping_add(attempt))
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed(seed)
    }
}
