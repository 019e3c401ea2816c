//! Seeded experiment harnesses.
//!
//! Each experiment is a pure function of its inputs and master seed. Trial
//! `i` draws everything from the stream derived from `(seed, i)`, so trials
//! can run in any order or in parallel and replay bit for bit.

mod concentration;
mod counting;
mod inverse;
mod removal;
mod report;

pub use concentration::{azuma_bound, concentration_experiment, ConcentrationParams};
pub use counting::{counting_experiment, CountingParams};
pub use inverse::{inverse_counting_experiment, strong_convergence_report, InverseParams};
pub use removal::{hereditary_experiment, removal_experiment};
pub use report::{ExperimentReport, Verdict};

use crate::rng::StreamKey;

/// Seed handed to the sampler in trial `trial` of stream `label`.
pub(crate) fn trial_seed(seed: u64, label: u64, trial: u64) -> u64 {
    StreamKey::new(seed).derive(label).at(trial)
}

/// Median of a nonempty list (mean of the middle pair for even lengths).
pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}
