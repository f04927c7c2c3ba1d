//! Diffusion coefficients `G`, `G~` acting on the noise eigenbasis.
//!
//! Every family shipped here is diagonal in the basis: `G(u) zeta_j =
//! d_j(u) zeta_j`. The images stay orthogonal in `L^2` and in `H^1`, so the
//! operator norms are `max_j |d_j|` and `max_j |d_j| |k_j|`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::basis::ModeBasis;
use super::path::seeded_rng;
use crate::error::{Error, Result};
use crate::random::{random_field, RandomFieldSpec};
use crate::spectral::{norm_sq, sobolev_norm_sq, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeFunctional {
    /// `m_j(u) = (u, zeta_j)`.
    Projection,
    /// `m_j(u) = min(1, ||u||)`.
    ClippedNorm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiffusionFamily {
    /// `d_j = sigma`.
    Additive { sigma: f64 },
    /// `d_j = sigma (base + swing tanh(||u|| / radius))`.
    DiagonalMultiplicative {
        sigma: f64,
        base: f64,
        swing: f64,
        radius: f64,
    },
    /// `d_j = sigma (offset + slope m_j(u))`.
    LinearModeScaled {
        sigma: f64,
        offset: f64,
        slope: f64,
        functional: ModeFunctional,
    },
}

/// Growth and Lipschitz constants claimed for a coefficient:
/// `||G(u)||^2 <= k0 + k1 ||u||^2`, `||G(u)-G(v)||^2 <= l1 ||u-v||^2`,
/// `||G(u)||_{L(K,V^1)}^2 <= k2 + k3 ||u||_{V^1}^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredConstants {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub l1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffusionSpec {
    pub coefficient: DiffusionFamily,
    pub constants: DeclaredConstants,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormLevel {
    /// `L(K, V^0)`
    L2,
    /// `L(K, V^1)`
    H1,
}

impl DiffusionSpec {
    pub fn additive(sigma: f64, basis: &ModeBasis) -> Self {
        let s2 = sigma * sigma;
        Self {
            coefficient: DiffusionFamily::Additive { sigma },
            constants: DeclaredConstants {
                k0: s2,
                k1: 0.0,
                k2: s2 * basis.max_wavenumber_sq(),
                k3: 0.0,
                l1: 0.0,
            },
        }
    }

    pub fn diagonal_multiplicative(sigma: f64, base: f64, swing: f64, radius: f64, basis: &ModeBasis) -> Self {
        let s2 = sigma * sigma;
        let top = base.abs() + swing.abs();
        Self {
            coefficient: DiffusionFamily::DiagonalMultiplicative {
                sigma,
                base,
                swing,
                radius,
            },
            constants: DeclaredConstants {
                k0: s2 * top * top,
                k1: 0.0,
                k2: s2 * top * top * basis.max_wavenumber_sq(),
                k3: 0.0,
                l1: s2 * swing * swing / (radius * radius),
            },
        }
    }

    pub fn linear_mode_scaled(
        sigma: f64,
        offset: f64,
        slope: f64,
        functional: ModeFunctional,
        basis: &ModeBasis,
    ) -> Self {
        let s2 = sigma * sigma;
        let kmax = basis.max_wavenumber_sq();
        let constants = match functional {
            // (a + b x)^2 <= 2a^2 + 2b^2 x^2 and |(u, zeta_j)| |k_j| <= ||A^{1/2} u||
            ModeFunctional::Projection => DeclaredConstants {
                k0: 2.0 * s2 * offset * offset,
                k1: 2.0 * s2 * slope * slope,
                k2: 2.0 * s2 * offset * offset * kmax,
                k3: 2.0 * s2 * slope * slope,
                l1: s2 * slope * slope,
            },
            ModeFunctional::ClippedNorm => {
                let top = offset.abs() + slope.abs();
                DeclaredConstants {
                    k0: s2 * top * top,
                    k1: 0.0,
                    k2: s2 * top * top * kmax,
                    k3: 0.0,
                    l1: s2 * slope * slope,
                }
            }
        };
        Self {
            coefficient: DiffusionFamily::LinearModeScaled {
                sigma,
                offset,
                slope,
                functional,
            },
            constants,
        }
    }

    /// Names accepted by [`preset`](Self::preset).
    pub const PRESETS: [&'static str; 4] = ["additive", "bounded_gain", "mode_projection", "clipped_norm"];

    /// Shipped coefficients with amplitude `sigma` and their declared constants.
    pub fn preset(name: &str, sigma: f64, basis: &ModeBasis) -> Result<Self> {
        Ok(match name {
            "additive" => Self::additive(sigma, basis),
            "bounded_gain" => Self::diagonal_multiplicative(sigma, 1.0, 0.5, 1.0, basis),
            "mode_projection" => Self::linear_mode_scaled(sigma, 0.5, 1.0, ModeFunctional::Projection, basis),
            "clipped_norm" => Self::linear_mode_scaled(sigma, 0.5, 0.5, ModeFunctional::ClippedNorm, basis),
            other => {
                return Err(Error::Noise(format!(
                    "unknown diffusion preset '{other}' (expected one of {})",
                    Self::PRESETS.join(", ")
                )))
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.constants;
        if [c.k0, c.k1, c.k2, c.k3, c.l1]
            .iter()
            .any(|x| !(x.is_finite() && *x >= 0.0))
        {
            return Err(Error::Noise("declared constants must be finite and nonnegative".into()));
        }
        let ok = match self.coefficient {
            DiffusionFamily::Additive { sigma } => sigma.is_finite(),
            DiffusionFamily::DiagonalMultiplicative {
                sigma,
                base,
                swing,
                radius,
            } => sigma.is_finite() && base.is_finite() && swing.is_finite() && radius.is_finite() && radius > 0.0,
            DiffusionFamily::LinearModeScaled {
                sigma, offset, slope, ..
            } => sigma.is_finite() && offset.is_finite() && slope.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Noise(format!(
                "invalid coefficient parameters {:?}",
                self.coefficient
            )))
        }
    }

    /// Whether `G` ignores the state.
    pub fn is_additive(&self) -> bool {
        matches!(self.coefficient, DiffusionFamily::Additive { .. })
    }

    /// Diagonal entries `d_j(state)`.
    pub fn gains<F: SpectralField>(&self, basis: &ModeBasis, state: &F) -> Result<Vec<f64>> {
        let j = basis.len();
        Ok(match self.coefficient {
            DiffusionFamily::Additive { sigma } => vec![sigma; j],
            DiffusionFamily::DiagonalMultiplicative {
                sigma,
                base,
                swing,
                radius,
            } => {
                let r = norm_sq(state).sqrt();
                vec![sigma * (base + swing * (r / radius).tanh()); j]
            }
            DiffusionFamily::LinearModeScaled {
                sigma,
                offset,
                slope,
                functional,
            } => match functional {
                ModeFunctional::Projection => basis
                    .project(state)?
                    .into_iter()
                    .map(|x| sigma * (offset + slope * x))
                    .collect(),
                ModeFunctional::ClippedNorm => {
                    let m = norm_sq(state).sqrt().min(1.0);
                    vec![sigma * (offset + slope * m); j]
                }
            },
        })
    }

    /// `||G(state)||^2` in `L(K, V^0)` or `L(K, V^1)`.
    pub fn operator_norm_sq<F: SpectralField>(&self, basis: &ModeBasis, state: &F, level: NormLevel) -> Result<f64> {
        let d = self.gains(basis, state)?;
        Ok(d.iter()
            .enumerate()
            .map(|(j, x)| {
                let w = match level {
                    NormLevel::L2 => 1.0,
                    NormLevel::H1 => basis.wavenumber_sq(j),
                };
                x * x * w
            })
            .fold(0.0, f64::max))
    }
}

/// `G(state) dW = sum_j d_j(state) dW_j zeta_j`.
pub fn apply_diffusion<F: SpectralField>(
    spec: &DiffusionSpec,
    basis: &ModeBasis,
    state: &F,
    increments: &[f64],
) -> Result<F> {
    if increments.len() != basis.len() {
        return Err(Error::Noise(format!(
            "increment row has {} entries, basis has {} modes",
            increments.len(),
            basis.len()
        )));
    }
    let gains = spec.gains(basis, state)?;
    let weights: Vec<f64> = gains.iter().zip(increments).map(|(d, w)| d * w).collect();
    basis.synthesize(&weights)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantCheck {
    pub name: &'static str,
    /// Smallest value of the constant consistent with the samples.
    pub empirical: f64,
    pub declared: f64,
}

impl ConstantCheck {
    pub fn passed(&self) -> bool {
        self.empirical <= self.declared * (1.0 + 1e-12) + 1e-300
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub samples: usize,
    pub checks: Vec<ConstantCheck>,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(ConstantCheck::passed)
    }
}

/// Empirically certify the declared constants over random states.
///
/// Growth: `max_u ||G(u)||^2 - k1 ||u||^2` must not exceed `k0` (same for
/// the `V^1` pair). Lipschitz: `max ||G(u)-G(v)||^2 / ||u-v||^2 <= l1`.
/// States range over many decades of amplitude, and difference sizes are
/// drawn independently so both the local and the global regime are probed.
pub fn verify_growth_lipschitz<F: SpectralField>(
    spec: &DiffusionSpec,
    basis: &ModeBasis,
    n_samples: usize,
    seed: u64,
) -> Result<CertificationReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let grid = *basis.grid();
    let c = spec.constants;
    let mut rng = seeded_rng(seed, 7);
    let (mut g0, mut g1, mut lip) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..n_samples {
        let u: F = draw(&grid, &mut rng, -3.0, 3.0);
        let n0 = spec.operator_norm_sq(basis, &u, NormLevel::L2)?;
        g0 = g0.max(n0 - c.k1 * norm_sq(&u));
        let n1 = spec.operator_norm_sq(basis, &u, NormLevel::H1)?;
        g1 = g1.max(n1 - c.k3 * sobolev_norm_sq(&u, 1.0));

        let du: F = draw(&grid, &mut rng, -6.0, 3.0);
        let mut v = u.clone();
        v.add_scaled(1.0, &du);
        let diff = norm_sq(&du);
        if diff > 0.0 {
            let a = spec.gains(basis, &u)?;
            let b = spec.gains(basis, &v)?;
            let op = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).fold(0.0, f64::max);
            lip = lip.max(op / diff);
        }
    }
    Ok(CertificationReport {
        samples: n_samples,
        checks: vec![
            ConstantCheck {
                name: "growth_l2",
                empirical: g0,
                declared: c.k0,
            },
            ConstantCheck {
                name: "lipschitz_l2",
                empirical: lip,
                declared: c.l1,
            },
            ConstantCheck {
                name: "growth_h1",
                empirical: g1,
                declared: c.k2,
            },
        ],
    })
}

fn draw<F: SpectralField, R: Rng>(grid: &crate::spectral::TorusGrid, rng: &mut R, lo: f64, hi: f64) -> F {
    let spec = RandomFieldSpec {
        norm: 10f64.powf(rng.random_range(lo..hi)),
        decay: rng.random_range(0.0..2.0),
        band: grid.cutoff(),
        with_mean: rng.random_bool(0.2),
    };
    random_field(*grid, &spec, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{FieldKind, ScalarField, TorusGrid, VectorField};

    fn basis(kind: FieldKind) -> ModeBasis {
        ModeBasis::new(TorusGrid::standard(16).unwrap(), kind, 24).unwrap()
    }

    #[test]
    fn additive_ignores_state_and_zero_noise_is_zero() {
        let b = basis(FieldKind::Vector);
        let spec = DiffusionSpec::additive(0.7, &b);
        let g = *b.grid();
        let u0 = VectorField::zeros(g);
        let mut rng = seeded_rng(1, 0);
        let u1: VectorField = random_field(g, &RandomFieldSpec::band_limited(&g), &mut rng);
        let dw: Vec<f64> = (0..b.len()).map(|j| 0.1 * j as f64).collect();
        assert_eq!(
            apply_diffusion(&spec, &b, &u0, &dw).unwrap(),
            apply_diffusion(&spec, &b, &u1, &dw).unwrap()
        );
        let zero = apply_diffusion(&spec, &b, &u1, &vec![0.0; b.len()]).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
        assert!(apply_diffusion(&spec, &b, &u1, &[1.0]).is_err());
    }

    #[test]
    fn additive_certificate_is_exact() {
        let b = basis(FieldKind::Scalar);
        let spec = DiffusionSpec::additive(0.3, &b);
        let r = verify_growth_lipschitz::<ScalarField>(&spec, &b, 200, 4).unwrap();
        assert!(r.passed());
        assert_eq!(r.checks[0].empirical, spec.constants.k0);
        assert_eq!(r.checks[1].empirical, 0.0);
        assert_eq!(spec.constants.k1, 0.0);
    }

    #[test]
    fn clipped_norm_gain_matches_direct_formula() {
        let b = basis(FieldKind::Scalar);
        let spec = DiffusionSpec::linear_mode_scaled(2.0, 0.5, 1.5, ModeFunctional::ClippedNorm, &b);
        let g = *b.grid();
        let dw: Vec<f64> = (0..b.len()).map(|j| ((j + 1) as f64).recip()).collect();
        for norm in [0.2, 0.9, 4.0] {
            let mut rng = seeded_rng(3, 0);
            let spec_f = RandomFieldSpec {
                norm,
                ..RandomFieldSpec::band_limited(&g)
            };
            let u: ScalarField = random_field(g, &spec_f, &mut rng);
            let out = apply_diffusion(&spec, &b, &u, &dw).unwrap();
            let factor = 2.0 * (0.5 + 1.5 * norm.min(1.0));
            let direct = b.synthesize::<ScalarField>(&dw).unwrap().scaled(factor);
            assert!(out.difference(&direct).max_abs() < 1e-14);
        }
    }

    #[test]
    fn under_declared_constant_fails() {
        let b = basis(FieldKind::Vector);
        let mut spec = DiffusionSpec::linear_mode_scaled(1.0, 0.2, 1.0, ModeFunctional::Projection, &b);
        assert!(verify_growth_lipschitz::<VectorField>(&spec, &b, 300, 8)
            .unwrap()
            .passed());
        spec.constants.l1 *= 0.5;
        let r = verify_growth_lipschitz::<VectorField>(&spec, &b, 300, 8).unwrap();
        assert!(!r.passed());
        assert!(!r.checks[1].passed());
    }
}
