//! Seeded random streams.
//!
//! Every stochastic component draws from a ChaCha8 generator addressed by
//! `(seed, stream)`, so results do not depend on thread scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SolverRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> SolverRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Independent sub-seed for components that address their own streams
/// (for example one stream per rollout trajectory).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    stream_rng(seed, stream).next_u64()
}

/// Stream ids used by the solver loop.
pub mod streams {
    pub const ROLLOUT: u64 = 1 << 32;
    pub const LAMBDA_SEARCH: u64 = 2 << 32;
    pub const ROOTS: u64 = 3 << 32;
    pub const COMPARE_STATES: u64 = 4 << 32;

    pub fn forward(iteration: usize) -> u64 {
        iteration as u64
    }
}
