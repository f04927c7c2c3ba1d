use std::collections::BTreeMap;

use serde::Serialize;

use super::errors::ErrorReport;
use crate::{Error, Result};

/// Ordinary least squares fit `y = slope * x + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

impl RateFit {
    /// Fits at least three finite points.
    pub fn fit(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Analysis(format!(
                "{} abscissae but {} ordinates",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 3 {
            return Err(Error::Analysis(format!(
                "rate fit needs at least 3 levels, got {}",
                x.len()
            )));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::Analysis("non-finite value in rate fit".into()));
        }
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        if sxx == 0.0 {
            return Err(Error::Analysis("rate fit abscissae are all equal".into()));
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - (slope * a + intercept)).collect();
        let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
        let ss_tot: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
        let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
        Ok(Self {
            slope,
            intercept,
            r_squared,
            residuals,
        })
    }

    /// Fits `ln y` against `ln x`.
    pub fn fit_log_log(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.iter().chain(y).any(|&v| v <= 0.0) {
            return Err(Error::Analysis("log-log fit needs positive data".into()));
        }
        let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
        Self::fit(&lx, &ly)
    }

    /// `exp(intercept) * x^slope`.
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

/// Mean with a normal-approximation 95% interval `(mean, lo, hi)`.
pub fn mean_ci(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, mean, mean);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let half = 1.96 * (var / n).sqrt();
    (mean, mean - half, mean + half)
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

/// Per-mesh aggregate entering a strong-rate fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSummary {
    pub steps: usize,
    pub step_size: f64,
    /// Reports at this level, before localization.
    pub samples: usize,
    /// Reports that entered the mean.
    pub used: usize,
    pub mean_sq_err: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub median_sq_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongRate {
    pub levels: Vec<LevelSummary>,
    /// Slope of `ln(mean max_sq_error)` against `ln h`.
    pub fit: RateFit,
}

/// Per-mesh means of `max_sq_error`. With `localized` set, only reports
/// inside the localization event enter each mean.
pub fn summarize_levels(reports: &[ErrorReport], localized: bool) -> Result<Vec<LevelSummary>> {
    let mut groups: BTreeMap<usize, Vec<&ErrorReport>> = BTreeMap::new();
    for r in reports {
        groups.entry(r.steps).or_default().push(r);
    }
    let mut levels = Vec::new();
    for (&steps, group) in &groups {
        let values: Vec<f64> = group
            .iter()
            .filter(|r| !localized || r.localized)
            .map(|r| r.max_sq_error)
            .collect();
        if values.is_empty() {
            return Err(Error::Analysis(format!(
                "every sample at N = {steps} is outside the localization set"
            )));
        }
        let (mean, lo, hi) = mean_ci(&values);
        levels.push(LevelSummary {
            steps,
            step_size: group[0].horizon / steps as f64,
            samples: group.len(),
            used: values.len(),
            mean_sq_err: mean,
            ci_lo: lo,
            ci_hi: hi,
            median_sq_err: median(&values),
        });
    }
    Ok(levels)
}

/// Fits `ln(mean max_sq_error)` against `ln h` over the mesh levels.
pub fn estimate_strong_rate(reports: &[ErrorReport], localized: bool) -> Result<StrongRate> {
    let levels = summarize_levels(reports, localized)?;
    let h: Vec<f64> = levels.iter().map(|l| l.step_size).collect();
    let e: Vec<f64> = levels.iter().map(|l| l.mean_sq_err).collect();
    let fit = RateFit::fit_log_log(&h, &e)?;
    Ok(StrongRate { levels, fit })
}
