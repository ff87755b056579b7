//! Closed-form laws, regime predictions and sample estimators.
//!
//! All logarithms are natural.

mod binomial;
mod estimate;
mod poisson;
mod predict;
mod special;
mod stats;

pub use binomial::{binomial_pmf, nucleation_count_pmf, nucleation_count_tail, nucleation_probability};
pub use estimate::{estimate, quantile_ci, Estimate, Sample, SampleTable};
pub use poisson::{exp_sum_tail, poisson_pmf, poisson_upper_tail};
pub use predict::{predict_droplet, predict_tau, DropletPhase, DropletPrediction, Regime, RegimePrediction, LAMBDA};
pub use stats::{dkw_epsilon, dominance_gap, ks_two_sample, mean_and_sd, Ecdf, KsResult};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("need at least {need} samples, have {have}")]
    InsufficientSamples { need: usize, have: usize },
    #[error("duplicate sample for {0}")]
    Duplicate(String),
}
