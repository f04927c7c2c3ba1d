use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::regression::RateFit;
use crate::scheme::{SchemeState, Trajectory};
use crate::spectral::{norm_sq, ScalarField, SpectralField, VectorField};
use crate::{Error, Result};

/// Per-lag sums of squared increments over all admissible base times of
/// one or more paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementSums {
    /// Lags in steps of the recording mesh.
    pub lags: Vec<usize>,
    pub sum_u: Vec<f64>,
    pub sum_theta: Vec<f64>,
    pub count: Vec<usize>,
}

impl IncrementSums {
    pub fn new(lags: Vec<usize>) -> Self {
        let n = lags.len();
        Self {
            lags,
            sum_u: vec![0.0; n],
            sum_theta: vec![0.0; n],
            count: vec![0; n],
        }
    }

    /// Adds `other` (same lags). Merge in a fixed order for reproducible sums.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if self.lags != other.lags {
            return Err(Error::Analysis("increment sums over different lag sets".into()));
        }
        for i in 0..self.lags.len() {
            self.sum_u[i] += other.sum_u[i];
            self.sum_theta[i] += other.sum_theta[i];
            self.count[i] += other.count[i];
        }
        Ok(())
    }
}

/// Streams one path's states and accumulates `||u(t+d)-u(t)||^2` for
/// every lag `d`, keeping only the last `max lag` states.
#[derive(Debug)]
pub struct IncrementRecorder {
    window: VecDeque<(VectorField, ScalarField)>,
    depth: usize,
    sums: IncrementSums,
}

impl IncrementRecorder {
    pub fn new(lags: Vec<usize>) -> Result<Self> {
        if lags.is_empty() || lags.contains(&0) {
            return Err(Error::Analysis("increment lags must be positive".into()));
        }
        let depth = *lags.iter().max().unwrap();
        Ok(Self {
            window: VecDeque::with_capacity(depth + 1),
            depth,
            sums: IncrementSums::new(lags),
        })
    }

    pub fn push(&mut self, state: &SchemeState) {
        self.window.push_back((state.u.clone(), state.theta.clone()));
        if self.window.len() > self.depth + 1 {
            self.window.pop_front();
        }
        let newest = self.window.len() - 1;
        let (u, theta) = &self.window[newest];
        for (i, &lag) in self.sums.lags.iter().enumerate() {
            if lag <= newest {
                let (pu, pt) = &self.window[newest - lag];
                self.sums.sum_u[i] += norm_sq(&u.difference(pu));
                self.sums.sum_theta[i] += norm_sq(&theta.difference(pt));
                self.sums.count[i] += 1;
            }
        }
    }

    pub fn finish(self) -> IncrementSums {
        self.sums
    }
}

/// Mean squared increments per lag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncrementTable {
    pub delta: Vec<f64>,
    pub mean_sq_increment_u: Vec<f64>,
    pub mean_sq_increment_theta: Vec<f64>,
}

impl IncrementTable {
    /// `h` is the time between consecutive recorded states.
    pub fn from_sums(sums: &IncrementSums, h: f64) -> Result<Self> {
        if sums.count.contains(&0) {
            return Err(Error::Analysis("a lag exceeds every recorded path".into()));
        }
        let n = sums.lags.len();
        Ok(Self {
            delta: sums.lags.iter().map(|&l| l as f64 * h).collect(),
            mean_sq_increment_u: (0..n).map(|i| sums.sum_u[i] / sums.count[i] as f64).collect(),
            mean_sq_increment_theta: (0..n).map(|i| sums.sum_theta[i] / sums.count[i] as f64).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncrementExponents {
    pub table: IncrementTable,
    /// Slope of `ln E||u(t+d)-u(t)||^2` against `ln d`.
    pub velocity: RateFit,
    pub temperature: RateFit,
}

impl IncrementExponents {
    /// Fits both slopes; lags must lie within `[h, T/4]`.
    pub fn fit(table: IncrementTable, h: f64, horizon: f64) -> Result<Self> {
        if table.delta.len() < 3 {
            return Err(Error::Analysis(format!(
                "increment fit needs at least 3 lags, got {}",
                table.delta.len()
            )));
        }
        let tiny = 1e-12 * horizon;
        if let Some(d) = table.delta.iter().find(|&&d| d < h - tiny || d > horizon / 4.0 + tiny) {
            return Err(Error::Analysis(format!("lag {d} outside [{h}, {}]", horizon / 4.0)));
        }
        let velocity = RateFit::fit_log_log(&table.delta, &table.mean_sq_increment_u)?;
        let temperature = RateFit::fit_log_log(&table.delta, &table.mean_sq_increment_theta)?;
        Ok(Self {
            table,
            velocity,
            temperature,
        })
    }
}

/// Increment exponents of an ensemble of trajectories on one mesh, from
/// their recorded states. `lags` are in steps of that mesh and must be
/// multiples of the recording stride.
pub fn estimate_increment_exponent(ensemble: &[Trajectory], lags: &[usize]) -> Result<IncrementExponents> {
    let first = ensemble
        .first()
        .ok_or_else(|| Error::Analysis("empty trajectory ensemble".into()))?;
    let (steps, stride, horizon) = (first.steps, first.stride, first.horizon);
    if ensemble
        .iter()
        .any(|t| t.steps != steps || t.stride != stride || t.horizon != horizon)
    {
        return Err(Error::Analysis("ensemble mixes meshes".into()));
    }
    if let Some(l) = lags.iter().find(|&&l| l % stride != 0) {
        return Err(Error::Analysis(format!(
            "lag {l} is not a multiple of the recording stride {stride}"
        )));
    }
    let recorded: Vec<usize> = lags.iter().map(|l| l / stride).collect();
    let mut total = IncrementSums::new(recorded.clone());
    for t in ensemble {
        let mut rec = IncrementRecorder::new(recorded.clone())?;
        for s in &t.recorded {
            rec.push(s);
        }
        total.merge(&rec.finish())?;
    }
    let h = horizon / steps as f64;
    let table = IncrementTable::from_sums(&total, h * stride as f64)?;
    IncrementExponents::fit(table, h, horizon)
}
