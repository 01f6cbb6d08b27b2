//! Deterministic work accounting.
//!
//! Wall-clock time is not reproducible, so runtime comparisons use these
//! operation counts weighted by rough flop costs.

use serde::{Deserialize, Serialize};

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkCounter {
    pub distance_evals: u64,
    pub sde_steps: u64,
    pub policy_calls: u64,
    pub candidate_evals: u64,
    pub regression_rows: u64,
}

impl WorkCounter {
    pub fn add(&mut self, other: &WorkCounter) {
        self.distance_evals += other.distance_evals;
        self.sde_steps += other.sde_steps;
        self.policy_calls += other.policy_calls;
        self.candidate_evals += other.candidate_evals;
        self.regression_rows += other.regression_rows;
    }

    /// Approximate flop count for state dimension `n` and feature count `p`.
    pub fn units(&self, n: usize, p: usize) -> u64 {
        let (n, p) = (n as u64, p as u64);
        self.distance_evals * 3 * n
            + self.sde_steps * (2 * n * n + 4 * n)
            + self.policy_calls * (2 * p * n + 4 * p)
            + self.candidate_evals * (6 * n + 2)
            + self.regression_rows * (2 * p * p + 2 * p)
    }
}
