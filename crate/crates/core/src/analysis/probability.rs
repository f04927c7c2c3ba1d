use std::collections::BTreeMap;

use serde::Serialize;

use super::errors::ErrorReport;
use crate::{Error, Result};

/// `P[max_sq_error + gradient_error_sum >= N^{-eta}]` at one mesh.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityEstimate {
    pub steps: usize,
    pub eta: f64,
    pub exceedances: usize,
    pub samples: usize,
    pub p_hat: f64,
    /// 95% Wilson score interval.
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl ProbabilityEstimate {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_hi - self.ci_lo)
    }

    /// True when this interval lies strictly above `other`'s.
    pub fn separated_above(&self, other: &Self) -> bool {
        self.ci_lo > other.ci_hi
    }
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054_f64;
    let n = n as f64;
    let p = k as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

pub fn estimate_probability_rate(reports: &[ErrorReport], eta: f64) -> Result<Vec<ProbabilityEstimate>> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Analysis(format!("eta must lie in (0, 1), got {eta}")));
    }
    let mut groups: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for r in reports {
        let threshold = (r.steps as f64).powf(-eta);
        let entry = groups.entry(r.steps).or_default();
        entry.1 += 1;
        if r.max_sq_error + r.gradient_error_sum >= threshold {
            entry.0 += 1;
        }
    }
    Ok(groups
        .into_iter()
        .map(|(steps, (k, n))| {
            let (lo, hi) = wilson_interval(k, n);
            ProbabilityEstimate {
                steps,
                eta,
                exceedances: k,
                samples: n,
                p_hat: k as f64 / n as f64,
                ci_lo: lo,
                ci_hi: hi,
            }
        })
        .collect())
}
