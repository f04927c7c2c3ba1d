use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{CovarianceSpec, DiffusionSpec, ModeBasis};
use crate::spectral::{FieldKind, TorusGrid};

pub const DEFAULT_PICARD_TOL: f64 = 1e-10;
pub const DEFAULT_PICARD_MAX_ITER: usize = 100;

/// Time-stepping parameters. The Galerkin space is the dealiased band of
/// `grid`; buoyancy acts along `v2 = (0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub grid: TorusGrid,
    /// Kinematic viscosity.
    pub nu: f64,
    /// Thermal diffusivity.
    pub kappa: f64,
    pub horizon: f64,
    pub steps: usize,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    /// Drop both advection terms (diagnostic linear mode).
    pub linear: bool,
}

impl SchemeConfig {
    pub fn new(grid: TorusGrid, nu: f64, kappa: f64, horizon: f64, steps: usize) -> Result<Self> {
        let cfg = Self {
            grid,
            nu,
            kappa,
            horizon,
            steps,
            picard_tol: DEFAULT_PICARD_TOL,
            picard_max_iter: DEFAULT_PICARD_MAX_ITER,
            linear: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive, got {x}")))
            }
        };
        positive("nu", self.nu)?;
        positive("kappa", self.kappa)?;
        positive("horizon", self.horizon)?;
        positive("picard_tol", self.picard_tol)?;
        if self.steps == 0 {
            return Err(Error::InvalidArgument("step count must be positive".into()));
        }
        if self.picard_max_iter == 0 {
            return Err(Error::InvalidArgument("picard_max_iter must be positive".into()));
        }
        Ok(())
    }

    pub fn with_steps(&self, steps: usize) -> Self {
        Self { steps, ..self.clone() }
    }

    /// `h = T / N`.
    pub fn step_size(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// `t_j = j T / N`.
    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.step_size()
    }
}

/// Noise driving one equation: eigenbasis, covariance and coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub basis: ModeBasis,
    pub covariance: CovarianceSpec,
    pub diffusion: DiffusionSpec,
}

impl NoiseModel {
    pub fn new(grid: TorusGrid, kind: FieldKind, covariance: CovarianceSpec, diffusion: DiffusionSpec) -> Result<Self> {
        covariance.validate()?;
        diffusion.validate()?;
        let basis = ModeBasis::new(grid, kind, covariance.count())?;
        Ok(Self {
            basis,
            covariance,
            diffusion,
        })
    }
}

/// Everything a step needs besides the state.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub scheme: SchemeConfig,
    pub velocity_noise: NoiseModel,
    pub temperature_noise: NoiseModel,
}

impl Model {
    pub fn new(scheme: SchemeConfig, velocity_noise: NoiseModel, temperature_noise: NoiseModel) -> Result<Self> {
        scheme.validate()?;
        if velocity_noise.basis.kind() != FieldKind::Vector || temperature_noise.basis.kind() != FieldKind::Scalar {
            return Err(Error::InvalidArgument(
                "velocity noise needs a vector basis and temperature noise a scalar basis".into(),
            ));
        }
        if velocity_noise.basis.grid() != &scheme.grid || temperature_noise.basis.grid() != &scheme.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            scheme,
            velocity_noise,
            temperature_noise,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.scheme.grid
    }
}
