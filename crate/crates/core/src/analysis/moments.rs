use serde::Serialize;

use super::regression::mean_ci;
use crate::scheme::TrajectoryStats;

/// Path functionals tabulated by [`moment_table`]; all are squared norms
/// or integrals of squared norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Functional {
    SupV0Velocity,
    SupV1Velocity,
    SupH0Temperature,
    SupH1Temperature,
    DissipationVelocity,
    DissipationTemperature,
    /// `max_l ||u^l||^2 + max_l ||theta^l||^2`
    SupEnergy,
}

impl Functional {
    pub const ALL: [Functional; 7] = [
        Functional::SupV0Velocity,
        Functional::SupV1Velocity,
        Functional::SupH0Temperature,
        Functional::SupH1Temperature,
        Functional::DissipationVelocity,
        Functional::DissipationTemperature,
        Functional::SupEnergy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Functional::SupV0Velocity => "sup_v0_u",
            Functional::SupV1Velocity => "sup_v1_u",
            Functional::SupH0Temperature => "sup_h0_theta",
            Functional::SupH1Temperature => "sup_h1_theta",
            Functional::DissipationVelocity => "dissipation_u",
            Functional::DissipationTemperature => "dissipation_theta",
            Functional::SupEnergy => "sup_energy",
        }
    }

    pub fn squared_value(self, s: &TrajectoryStats) -> f64 {
        match self {
            Functional::SupV0Velocity => s.sup_v0_u,
            Functional::SupV1Velocity => s.sup_v1_u,
            Functional::SupH0Temperature => s.sup_h0_theta,
            Functional::SupH1Temperature => s.sup_h1_theta,
            Functional::DissipationVelocity => s.dissipation_u,
            Functional::DissipationTemperature => s.dissipation_theta,
            Functional::SupEnergy => s.sup_energy(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub steps: usize,
    pub order: u32,
    pub functional: Functional,
    pub estimate: f64,
    pub stderr: f64,
}

/// `E[X^{q/2}]` for every functional `X` (a squared norm) and order `q`,
/// i.e. the `q`-th moment of the norm, per mesh. Standard errors are
/// `sd / sqrt(P)` (zero for a single path).
pub fn moment_table(ensembles: &[(usize, Vec<TrajectoryStats>)], orders: &[u32]) -> Vec<MomentRow> {
    let mut rows = Vec::new();
    for (steps, stats) in ensembles {
        if stats.is_empty() {
            continue;
        }
        for &order in orders {
            for f in Functional::ALL {
                let values: Vec<f64> = stats
                    .iter()
                    .map(|s| f.squared_value(s).powf(order as f64 / 2.0))
                    .collect();
                let (mean, _, hi) = mean_ci(&values);
                rows.push(MomentRow {
                    steps: *steps,
                    order,
                    functional: f,
                    estimate: mean,
                    stderr: (hi - mean) / 1.96,
                });
            }
        }
    }
    rows
}
