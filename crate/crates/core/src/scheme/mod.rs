//! Fully implicit Euler time stepping of the Galerkin-truncated system.

mod config;
mod solver;
mod state;

pub use config::{Model, NoiseModel, SchemeConfig, DEFAULT_PICARD_MAX_ITER, DEFAULT_PICARD_TOL};
pub use solver::{energy_residual, EnergyResidual, Forcing, Solver, Trajectory};
pub use state::{SchemeState, TrajectoryStats};
