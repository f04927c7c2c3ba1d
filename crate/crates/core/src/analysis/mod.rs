//! Error functionals against coupled references, the localization event,
//! and the regressions behind the rate experiments.

mod constants;
mod errors;
mod increments;
mod moments;
mod probability;
mod regression;

pub use constants::{
    estimate_gn_constant, fit_log_rate_constant, log_rate_envelope, log_rate_exponent, GnEstimate, RateConstants,
};
pub use errors::{compute_errors, ErrorAccumulator, ErrorReport, LocalizationConfig};
pub use increments::{
    estimate_increment_exponent, IncrementExponents, IncrementRecorder, IncrementSums, IncrementTable,
};
pub use moments::{moment_table, Functional, MomentRow};
pub use probability::{estimate_probability_rate, wilson_interval, ProbabilityEstimate};
pub use regression::{estimate_strong_rate, mean_ci, median, summarize_levels, LevelSummary, RateFit, StrongRate};
