//! Partition combinatorics, cumulant estimation, scaling-exponent fits,
//! deviation-bound evaluators and brute-force verifiers for closed-form
//! identities.
//!
//! Moment/cumulant conversions exist in both f64 and exact rational form;
//! k-statistics are derived symbolically (exact rational coefficient solve at
//! the given sample size) so unbiasedness holds by construction rather than
//! by transcribed formulas.

mod kstats;
mod normal;
mod partitions;
mod quadrature;
mod stats;

pub use kstats::{k_statistics, CumulantEstimates};
pub use normal::{normal_cdf, normal_pdf, normal_sf};
pub use partitions::{
    cumulants_to_moments, cumulants_to_moments_exact, integer_partitions, lemma56_max_product,
    moments_to_cumulants, moments_to_cumulants_exact, set_partitions, CompositionMax,
};
pub use quadrature::adaptive_simpson;
pub use stats::{
    fit_scaling_exponent, ks_distance, lemma51_eval, mdp_functional, relative_error_tail,
    standardize, thm_tail_bound, BoundParams, ExponentFit, MdpValue, TailRatio, TailRatios,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CumulantError {
    #[error("order {k} too large (supported up to {max})")]
    TooLarge { k: usize, max: usize },
    #[error("insufficient samples: have {n}, need more than {needed}")]
    InsufficientSamples { n: usize, needed: usize },
    #[error("non-positive value in a log-log fit")]
    NonPositiveValue,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("empty tail at threshold {threshold}: no sample beyond it (one-sided bound on the log-ratio: {one_sided_bound_log_ratio})")]
    EmptyTail {
        threshold: f64,
        one_sided_bound_log_ratio: f64,
    },
}
