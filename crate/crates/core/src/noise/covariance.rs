use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalue law `j -> q_j`, `j = 1, 2, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum EigenLaw {
    /// `q_j = j^{-alpha}`, `alpha > 1`.
    PowerLaw {
        alpha: f64,
    },
    /// `q_j = e^{-gamma j}`.
    Exponential {
        gamma: f64,
    },
    FiniteList {
        values: Vec<f64>,
    },
}

/// Diagonal trace-class covariance truncated to `count` modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceSpec {
    #[serde(flatten)]
    pub law: EigenLaw,
    /// Number of retained eigenpairs `J`.
    pub modes: usize,
}

impl Default for CovarianceSpec {
    fn default() -> Self {
        Self {
            law: EigenLaw::PowerLaw { alpha: 2.0 },
            modes: 64,
        }
    }
}

impl CovarianceSpec {
    pub fn power_law(alpha: f64, modes: usize) -> Result<Self> {
        Self::checked(EigenLaw::PowerLaw { alpha }, modes)
    }

    pub fn exponential(gamma: f64, modes: usize) -> Result<Self> {
        Self::checked(EigenLaw::Exponential { gamma }, modes)
    }

    pub fn finite(values: Vec<f64>) -> Result<Self> {
        let modes = values.len();
        Self::checked(EigenLaw::FiniteList { values }, modes)
    }

    fn checked(law: EigenLaw, modes: usize) -> Result<Self> {
        let spec = Self { law, modes };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(Error::Noise("covariance needs at least one mode".into()));
        }
        match &self.law {
            EigenLaw::PowerLaw { alpha } if !(alpha.is_finite() && *alpha > 1.0) => {
                Err(Error::Noise(format!("power law exponent must exceed 1, got {alpha}")))
            }
            EigenLaw::Exponential { gamma } if !(gamma.is_finite() && *gamma > 0.0) => {
                Err(Error::Noise(format!("exponential rate must be positive, got {gamma}")))
            }
            EigenLaw::FiniteList { values } => {
                if values.len() != self.modes {
                    return Err(Error::Noise(format!(
                        "finite list has {} eigenvalues but {} modes were requested",
                        values.len(),
                        self.modes
                    )));
                }
                if values.iter().any(|q| !(q.is_finite() && *q > 0.0)) {
                    return Err(Error::Noise("eigenvalues must be positive and finite".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn count(&self) -> usize {
        self.modes
    }

    pub fn eigenvalue(&self, j: usize) -> f64 {
        let x = (j + 1) as f64;
        match &self.law {
            EigenLaw::PowerLaw { alpha } => x.powf(-alpha),
            EigenLaw::Exponential { gamma } => (-gamma * x).exp(),
            EigenLaw::FiniteList { values } => values[j],
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        (0..self.modes).map(|j| self.eigenvalue(j)).collect()
    }

    /// `Tr(Q)` of the truncated operator.
    pub fn trace(&self) -> f64 {
        self.eigenvalues().iter().sum()
    }

    /// Upper bound on the eigenvalue mass dropped by truncating the
    /// infinite law after `J` modes. Zero for finite lists.
    pub fn truncation_tail(&self) -> f64 {
        let j = self.modes as f64;
        match &self.law {
            // sum_{i > J} i^{-a} <= int_J^inf x^{-a} dx
            EigenLaw::PowerLaw { alpha } => j.powf(1.0 - alpha) / (alpha - 1.0),
            EigenLaw::Exponential { gamma } => (-gamma * (j + 1.0)).exp() / (1.0 - (-gamma).exp()),
            EigenLaw::FiniteList { .. } => 0.0,
        }
    }

    /// A truncation (a power of two) whose declared tail is below
    /// `rel * trace`.
    pub fn modes_for_tail(law: &EigenLaw, rel: f64) -> Result<usize> {
        let mut modes = 1usize;
        loop {
            let spec = Self::checked(law.clone(), modes)?;
            if spec.truncation_tail() < rel * spec.trace() {
                return Ok(modes);
            }
            if modes > 1 << 40 {
                return Err(Error::Noise("tail tolerance unreachable".into()));
            }
            modes *= 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_is_explicit_sum() {
        let c = CovarianceSpec::power_law(2.0, 64).unwrap();
        let direct: f64 = (1..=64).map(|j| 1.0 / (j * j) as f64).sum();
        assert_eq!(c.trace(), direct);
        assert_eq!(c.eigenvalue(0), 1.0);
        assert_eq!(c.eigenvalue(1), 0.25);
    }

    #[test]
    fn tail_bounds_the_dropped_mass() {
        for spec in [
            CovarianceSpec::power_law(2.0, 64).unwrap(),
            CovarianceSpec::power_law(3.5, 10).unwrap(),
            CovarianceSpec::exponential(0.5, 20).unwrap(),
        ] {
            let full = CovarianceSpec {
                modes: 200_000,
                ..spec.clone()
            };
            let dropped = full.trace() - spec.trace();
            assert!(dropped <= spec.truncation_tail() * (1.0 + 1e-9));
            assert!(dropped >= 0.5 * spec.truncation_tail(), "tail bound too loose");
        }
    }

    #[test]
    fn tail_target_is_met() {
        let law = EigenLaw::PowerLaw { alpha: 4.0 };
        let j = CovarianceSpec::modes_for_tail(&law, 1e-8).unwrap();
        let spec = CovarianceSpec::checked(law, j).unwrap();
        assert!(spec.truncation_tail() < 1e-8 * spec.trace());
    }

    #[test]
    fn invalid_laws_are_rejected() {
        assert!(CovarianceSpec::power_law(1.0, 4).is_err());
        assert!(CovarianceSpec::exponential(0.0, 4).is_err());
        assert!(CovarianceSpec::finite(vec![]).is_err());
        assert!(CovarianceSpec::finite(vec![1.0, -1.0]).is_err());
        assert!(CovarianceSpec::power_law(2.0, 0).is_err());
    }
}
