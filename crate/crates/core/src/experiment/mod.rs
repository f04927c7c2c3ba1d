//! Configuration-driven experiment campaigns and their reports.

mod campaign;
mod config;
mod initial;
pub mod report;
mod selftest;

pub use campaign::{
    localization_threshold, run_converge, run_increments, run_moments, run_simulate, sup_energy_means, ConvergePath,
    ConvergeSummary, IncrementPath, IncrementSummary, MomentPath, MomentSummary, Outcome, PathFailure, RunOptions,
    SimulateSummary,
};
pub use config::{CampaignSection, ExperimentConfig, NoiseSection, SchemeSection};
pub use initial::{InitialData, ModeAmplitude, Parity};
pub use selftest::{direct_convective, run_selftest, SelfCheck, SelftestReport};
