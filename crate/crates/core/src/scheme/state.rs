use serde::{Deserialize, Serialize};

use crate::spectral::{ScalarField, SpectralField, TorusGrid, VectorField};

/// The discrete pair `(u^l, theta^l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeState {
    pub step: usize,
    pub u: VectorField,
    pub theta: ScalarField,
    /// Picard iterations spent on the velocity / temperature solves of this step.
    pub picard_iters: (usize, usize),
}

impl SchemeState {
    pub fn new(u: VectorField, theta: ScalarField) -> Self {
        Self {
            step: 0,
            u,
            theta,
            picard_iters: (0, 0),
        }
    }

    pub fn rest(grid: TorusGrid) -> Self {
        Self::new(VectorField::zeros(grid), ScalarField::zeros(grid))
    }
}

/// Running functionals of a trajectory (all norms squared).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStats {
    pub steps: usize,
    /// `max_l ||u^l||^2`
    pub sup_v0_u: f64,
    /// `max_l ||A^{1/2} u^l||^2`
    pub sup_v1_u: f64,
    pub sup_h0_theta: f64,
    pub sup_h1_theta: f64,
    /// `h sum_{l>=1} ||A^{1/2} u^l||^2`
    pub dissipation_u: f64,
    pub dissipation_theta: f64,
    /// Relative energy-identity defects per step.
    pub energy_residuals: Vec<(f64, f64)>,
    pub picard_iters: Vec<(usize, usize)>,
}

impl TrajectoryStats {
    pub fn max_energy_residual(&self) -> (f64, f64) {
        self.energy_residuals
            .iter()
            .fold((0.0, 0.0), |(a, b), &(x, y)| (f64::max(a, x), f64::max(b, y)))
    }

    /// `max_l ||u^l||^2 + max_l ||theta^l||^2`.
    pub fn sup_energy(&self) -> f64 {
        self.sup_v0_u + self.sup_h0_theta
    }
}
