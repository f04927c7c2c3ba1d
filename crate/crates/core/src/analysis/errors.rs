use serde::{Deserialize, Serialize};

use crate::scheme::{SchemeState, Trajectory, TrajectoryStats};
use crate::spectral::{gradient_pairing, norm_sq, SpectralField};
use crate::{Error, Result};

/// The localization event: the reference trajectory's `H^1` seminorms
/// (squared) stay below `threshold` at every reference time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationConfig {
    pub threshold: f64,
}

impl LocalizationConfig {
    pub fn new(threshold: f64) -> Result<Self> {
        if threshold.is_nan() || threshold <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "localization threshold must be positive, got {threshold}"
            )));
        }
        Ok(Self { threshold })
    }

    /// Every path localizes.
    pub fn unbounded() -> Self {
        Self {
            threshold: f64::INFINITY,
        }
    }

    pub fn contains(&self, reference: &TrajectoryStats) -> bool {
        reference.sup_v1_u <= self.threshold && reference.sup_h1_theta <= self.threshold
    }
}

/// Errors of one coarse trajectory against its coupled reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub seed: u64,
    pub steps: usize,
    pub horizon: f64,
    /// `||e_j||^2` for `j = 0..=N`.
    pub err_u_sq: Vec<f64>,
    /// `||ẽ_j||^2` for `j = 0..=N`.
    pub err_theta_sq: Vec<f64>,
    /// `||A^{1/2} e_j||^2 + ||Ã^{1/2} ẽ_j||^2` for `j = 0..=N`.
    pub grad_err_sq: Vec<f64>,
    /// `max_j (||e_j||^2 + ||ẽ_j||^2)`
    pub max_sq_error: f64,
    /// `(T/N) sum_{j>=1} (||A^{1/2} e_j||^2 + ||Ã^{1/2} ẽ_j||^2)`
    pub gradient_error_sum: f64,
    pub localized: bool,
    pub threshold: f64,
}

impl ErrorReport {
    pub fn time(&self, j: usize) -> f64 {
        self.horizon * j as f64 / self.steps as f64
    }

    /// `(T/N) sum_{1<=i<=j}` of the gradient terms.
    pub fn cumulative_gradient_sum(&self) -> Vec<f64> {
        let h = self.horizon / self.steps as f64;
        let mut acc = 0.0;
        self.grad_err_sq
            .iter()
            .enumerate()
            .map(|(j, g)| {
                if j > 0 {
                    acc += h * g;
                }
                acc
            })
            .collect()
    }
}

/// Builds an [`ErrorReport`] one coarse state at a time, so a coarse
/// trajectory need not be stored.
#[derive(Debug)]
pub struct ErrorAccumulator<'a> {
    reference: &'a Trajectory,
    steps: usize,
    ratio: usize,
    report: ErrorReport,
}

impl<'a> ErrorAccumulator<'a> {
    /// `reference` must hold its state at every time of the `steps` mesh.
    pub fn new(reference: &'a Trajectory, steps: usize, loc: LocalizationConfig) -> Result<Self> {
        if steps == 0 || !reference.steps.is_multiple_of(steps) {
            return Err(Error::MeshIncompatible {
                coarse: steps,
                fine: reference.steps,
            });
        }
        let ratio = reference.steps / steps;
        if !ratio.is_multiple_of(reference.stride) {
            return Err(Error::Analysis(format!(
                "reference recorded every {} steps cannot be sampled at mesh N = {steps}",
                reference.stride
            )));
        }
        Ok(Self {
            reference,
            steps,
            ratio,
            report: ErrorReport {
                seed: reference.seed,
                steps,
                horizon: reference.horizon,
                err_u_sq: vec![f64::NAN; steps + 1],
                err_theta_sq: vec![f64::NAN; steps + 1],
                grad_err_sq: vec![f64::NAN; steps + 1],
                max_sq_error: 0.0,
                gradient_error_sum: 0.0,
                localized: loc.contains(&reference.stats),
                threshold: loc.threshold,
            },
        })
    }

    pub fn observe(&mut self, j: usize, state: &SchemeState) -> Result<()> {
        let r = self
            .reference
            .state_at(j * self.ratio)
            .ok_or_else(|| Error::Analysis(format!("reference has no state at index {}", j * self.ratio)))?;
        let eu = r.u.difference(&state.u);
        let et = r.theta.difference(&state.theta);
        self.report.err_u_sq[j] = norm_sq(&eu);
        self.report.err_theta_sq[j] = norm_sq(&et);
        self.report.grad_err_sq[j] = gradient_pairing(&eu, &eu) + gradient_pairing(&et, &et);
        Ok(())
    }

    pub fn finish(mut self) -> Result<ErrorReport> {
        let r = &mut self.report;
        if r.err_u_sq.iter().any(|v| v.is_nan()) {
            return Err(Error::Analysis(format!(
                "coarse trajectory at N = {} was not observed at every time",
                self.steps
            )));
        }
        r.max_sq_error = r
            .err_u_sq
            .iter()
            .zip(&r.err_theta_sq)
            .map(|(a, b)| a + b)
            .fold(0.0, f64::max);
        let h = r.horizon / r.steps as f64;
        r.gradient_error_sum = h * r.grad_err_sq.iter().skip(1).sum::<f64>();
        Ok(self.report)
    }
}

/// Errors of `coarse` against `reference` at the coarse times, looked up
/// by exact index in the reference. Both must come from the same path.
pub fn compute_errors(coarse: &Trajectory, reference: &Trajectory, loc: LocalizationConfig) -> Result<ErrorReport> {
    if coarse.seed != reference.seed {
        return Err(Error::PathMismatch(coarse.seed, reference.seed));
    }
    if coarse.horizon != reference.horizon {
        return Err(Error::Analysis(format!(
            "horizons differ: {} vs {}",
            coarse.horizon, reference.horizon
        )));
    }
    if coarse.stride != 1 {
        return Err(Error::Analysis("coarse trajectory must record every step".into()));
    }
    let mut acc = ErrorAccumulator::new(reference, coarse.steps, loc)?;
    for (j, state) in coarse.recorded.iter().enumerate() {
        acc.observe(j, state)?;
    }
    acc.finish()
}
