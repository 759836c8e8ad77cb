//! Seeded verification suites. Each run is deterministic in its seed and
//! returns a [`Report`] whose checks tally the instances examined.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ad::AdError;
use crate::bell::BellError;
use crate::budget::Budget;
use crate::density::DensityError;
use crate::kelley::KelleyError;
use crate::report::Report;
use crate::slalom::SlalomError;

mod bell;
mod cl2;
mod diagonal;
mod kappa;
mod ll;
mod positive;
mod transfer;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

pub const SUITES: &[&str] = &[
    "transfer",
    "positive",
    "ll",
    "kappa",
    "cl2",
    "bell-measure",
    "bell-iso",
    "bell-positivity",
    "diagonal",
];

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Ad(#[from] AdError),
    #[error(transparent)]
    Slalom(#[from] SlalomError),
    #[error(transparent)]
    Kelley(#[from] KelleyError),
    #[error(transparent)]
    Bell(#[from] BellError),
}

pub fn run_suite(name: &str, seed: u64, budget: &Budget) -> Result<Report, SuiteError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = match name {
        "transfer" => transfer::run(&mut rng)?,
        "positive" => positive::run(&mut rng)?,
        "ll" => ll::run(&mut rng)?,
        "kappa" => kappa::run(&mut rng, budget)?,
        "cl2" => cl2::run(&mut rng, budget)?,
        "bell-measure" => bell::measure(&mut rng)?,
        "bell-iso" => bell::iso(&mut rng, budget)?,
        "bell-positivity" => bell::positivity(&mut rng)?,
        "diagonal" => diagonal::run(&mut rng)?,
        _ => return Err(SuiteError::UnknownSuite(name.to_string())),
    };
    Ok(Report::new(name, seed, checks))
}

/// `count` seeded random members of the class `W^δ_(S,n)`.
pub fn sample_class_members(
    seed: u64,
    class: &crate::slalom::OmegaPoint,
    delta: &crate::rational::Rational,
    count: usize,
) -> Result<Vec<crate::slalom::Slalom>, SuiteError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| cl2::member_of_class(&mut rng, class, delta)).collect()
}

/// Keeps the first few offending instances for the report.
pub(crate) struct Failures<T> {
    pub count: u64,
    pub kept: Vec<T>,
}

impl<T> Failures<T> {
    pub fn new() -> Self {
        Self { count: 0, kept: Vec::new() }
    }

    pub fn push(&mut self, t: T) {
        self.count += 1;
        if self.kept.len() < 3 {
            self.kept.push(t);
        }
    }
}
