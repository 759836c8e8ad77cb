//! Search guards shared by the combinatorial searches.

use crate::{bell, kelley};

/// Environment variable overriding every guard with one cap.
pub const BUDGET_ENV: &str = "GROWTHLAB_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Subset evaluations in intersection-number searches.
    pub subsets: u64,
    /// Tree nodes visited by Bell searches and sweeps.
    pub nodes: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { subsets: kelley::DEFAULT_GUARD, nodes: bell::DEFAULT_NODE_BUDGET }
    }
}

impl Budget {
    pub fn uniform(cap: u64) -> Self {
        Self { subsets: cap, nodes: cap }
    }

    /// Defaults, unless the environment variable holds a cap.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map(Self::uniform)
                .map_err(|_| format!("{BUDGET_ENV} must be a nonnegative integer, got {v:?}")),
            Err(_) => Ok(Self::default()),
        }
    }
}
