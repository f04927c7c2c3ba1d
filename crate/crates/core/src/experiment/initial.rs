use serde::{Deserialize, Serialize};

use crate::noise::{seeded_rng, stream};
use crate::random::{random_field, RandomFieldSpec};
use crate::scheme::SchemeState;
use crate::spectral::{Complex64, ScalarField, SpectralField, TorusGrid, VectorField};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Cos,
    Sin,
}

/// `amplitude * cos(k.x)` (or `sin`) at wavevector index `(n1, n2)`; for
/// the velocity the mode is polarised along `k_perp / |k|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeAmplitude {
    pub n1: i64,
    pub n2: i64,
    pub amplitude: f64,
    #[serde(default = "default_parity")]
    pub parity: Parity,
}

fn default_parity() -> Parity {
    Parity::Cos
}

/// Initial condition of every path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// Sum of prescribed Fourier modes.
    Modes {
        #[serde(default)]
        velocity: Vec<ModeAmplitude>,
        #[serde(default)]
        temperature: Vec<ModeAmplitude>,
    },
    /// Gaussian field with coefficient standard deviation
    /// `scale * (1 + |n|^2)^{-decay/2}`. Without `seed` each path draws its
    /// own field from its path seed.
    Gaussian {
        velocity_scale: f64,
        temperature_scale: f64,
        #[serde(default = "default_decay")]
        decay: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

fn default_decay() -> f64 {
    2.0
}

impl InitialData {
    pub fn validate(&self, grid: &TorusGrid) -> Result<()> {
        match self {
            InitialData::Modes { velocity, temperature } => {
                let c = grid.cutoff() as i64;
                for m in velocity.iter().chain(temperature) {
                    if m.n1.abs() > c || m.n2.abs() > c {
                        return Err(Error::Config(format!(
                            "initial: mode ({}, {}) lies outside the retained band |n| <= {c}",
                            m.n1, m.n2
                        )));
                    }
                    if !m.amplitude.is_finite() {
                        return Err(Error::Config("initial: amplitudes must be finite".into()));
                    }
                }
                if velocity.iter().any(|m| m.n1 == 0 && m.n2 == 0) {
                    return Err(Error::Config(
                        "initial: velocity mode (0, 0) has no divergence-free polarisation".into(),
                    ));
                }
                Ok(())
            }
            InitialData::Gaussian {
                velocity_scale,
                temperature_scale,
                decay,
                ..
            } => {
                if [*velocity_scale, *temperature_scale, *decay]
                    .iter()
                    .any(|x| !(x.is_finite() && *x >= 0.0))
                {
                    return Err(Error::Config(
                        "initial: scales and decay must be finite and nonnegative".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Initial state of the path with seed `path_seed`.
    pub fn state(&self, grid: TorusGrid, path_seed: u64) -> Result<SchemeState> {
        self.validate(&grid)?;
        Ok(match self {
            InitialData::Modes { velocity, temperature } => {
                let mut u = VectorField::zeros(grid);
                for m in velocity {
                    let (k1, k2) = (grid.wavenumber(m.n1), grid.wavenumber(m.n2));
                    let norm = k1.hypot(k2);
                    add_mode(&grid, &mut u.components_mut()[0], m, -k2 / norm);
                    add_mode(&grid, &mut u.components_mut()[1], m, k1 / norm);
                }
                let mut theta = ScalarField::zeros(grid);
                for m in temperature {
                    add_mode(&grid, theta.coeffs_mut(), m, 1.0);
                }
                SchemeState::new(u, theta)
            }
            InitialData::Gaussian {
                velocity_scale,
                temperature_scale,
                decay,
                seed,
            } => {
                let mut rng = seeded_rng(seed.unwrap_or(path_seed), stream::INITIAL_DATA);
                let spec = RandomFieldSpec {
                    norm: 0.0,
                    decay: *decay,
                    band: grid.cutoff(),
                    with_mean: false,
                };
                let u: VectorField = random_field(grid, &spec, &mut rng);
                let theta: ScalarField = random_field(grid, &spec, &mut rng);
                SchemeState::new(u.scaled(*velocity_scale), theta.scaled(*temperature_scale))
            }
        })
    }
}

fn add_mode(grid: &TorusGrid, coeffs: &mut [Complex64], m: &ModeAmplitude, weight: f64) {
    let k = grid.modes();
    let a = 0.5 * m.amplitude * weight;
    // cos: (a, a) at (n, -n); sin: (-i a, i a)
    let (plus, minus) = match m.parity {
        Parity::Cos => (Complex64::new(a, 0.0), Complex64::new(a, 0.0)),
        Parity::Sin => (Complex64::new(0.0, -a), Complex64::new(0.0, a)),
    };
    if m.n1 == 0 && m.n2 == 0 {
        if m.parity == Parity::Cos {
            coeffs[0] += Complex64::new(m.amplitude * weight, 0.0);
        }
        return;
    }
    coeffs[grid.slot_of(m.n1) * k + grid.slot_of(m.n2)] += plus;
    coeffs[grid.slot_of(-m.n1) * k + grid.slot_of(-m.n2)] += minus;
}
