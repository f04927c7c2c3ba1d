use rand::Rng;
use serde::Serialize;

use crate::noise::seeded_rng;
use crate::nonlinear::AdvectionWorkspace;
use crate::random::{random_field, RandomFieldSpec};
use crate::spectral::{leray_project, norm_sq, sobolev_norm_sq, Complex64, SpectralField, TorusGrid, VectorField};
use crate::{Error, Result};

/// Constants of the localized error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateConstants {
    /// Target exponent in `(0, 1)`.
    pub eta: f64,
    pub gamma: f64,
    /// Empirical Gagliardo–Nirenberg constant for `L^4`.
    pub gn_constant: f64,
    pub nu: f64,
    pub kappa: f64,
}

impl RateConstants {
    pub fn new(eta: f64, gamma: f64, gn_constant: f64, nu: f64, kappa: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::Analysis(format!("eta must lie in (0, 1), got {eta}")));
        }
        if !(gamma > 0.0 && gn_constant > 0.0 && nu > 0.0 && kappa > 0.0) {
            return Err(Error::Analysis(
                "gamma, GN constant, nu and kappa must be positive".into(),
            ));
        }
        Ok(Self {
            eta,
            gamma,
            gn_constant,
            nu,
            kappa,
        })
    }

    /// `9 (1 + gamma) C^2 / 8 * max(5/nu, 1/kappa) * M`
    pub fn coupling(&self, m: f64) -> f64 {
        9.0 * (1.0 + self.gamma) * self.gn_constant.powi(2) / 8.0 * f64::max(5.0 / self.nu, 1.0 / self.kappa) * m
    }

    /// `exp(coupling(M) * T)`, the growth factor of the localized bound.
    pub fn growth_factor(&self, m: f64, horizon: f64) -> f64 {
        (self.coupling(m) * horizon).exp()
    }
}

/// Largest observed `||u||_{L^4} / (||A^{1/2} u||^{1/2} ||u||^{1/2})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GnEstimate {
    pub constant: f64,
    pub samples: usize,
}

/// Estimates the `L^4` Gagliardo–Nirenberg constant on `grid` from single
/// Fourier modes, flat spectra (concentrated bumps) and `random` random
/// band-limited fields of varying smoothness.
pub fn estimate_gn_constant(grid: TorusGrid, random: usize, seed: u64) -> Result<GnEstimate> {
    let mut ws = AdvectionWorkspace::new(grid);
    let mut best: f64 = 0.0;
    let mut samples = 0;
    let mut consider = |u: &VectorField, ws: &mut AdvectionWorkspace| -> Result<()> {
        let l2 = norm_sq(u);
        let h1 = sobolev_norm_sq(u, 1.0);
        if l2 > 0.0 && h1 > 0.0 {
            best = best.max(ws.lebesgue4_norm(u)? / (h1 * l2).powf(0.25));
            samples += 1;
        }
        Ok(())
    };
    let c = grid.cutoff() as i64;
    let one = Complex64::new(1.0, 0.0);
    for n1 in 0..=c {
        for n2 in 0..=c {
            if n1 == 0 && n2 == 0 {
                continue;
            }
            // cos mode with a divergence-free polarisation
            let mut u = VectorField::zeros(grid);
            let (p1, p2) = (-(n2 as f64), n1 as f64);
            for sign in [1, -1] {
                u.set_coeff(0, sign * n1, sign * n2, one * p1);
                u.set_coeff(1, sign * n1, sign * n2, one * p2);
            }
            consider(&u, &mut ws)?;
        }
    }
    for band in 1..=c {
        for comp in 0..2 {
            let mut u = VectorField::zeros(grid);
            for n1 in -band..=band {
                for n2 in -band..=band {
                    if (n1, n2) != (0, 0) {
                        u.set_coeff(comp, n1, n2, one);
                    }
                }
            }
            consider(&leray_project(&u), &mut ws)?;
        }
    }
    let mut rng = seeded_rng(seed, 7);
    for _ in 0..random {
        let spec = RandomFieldSpec {
            norm: 1.0,
            decay: rng.random_range(0.0..4.0),
            band: rng.random_range(1..=grid.cutoff()),
            with_mean: false,
        };
        let u: VectorField = random_field(grid, &spec, &mut rng);
        consider(&u, &mut ws)?;
    }
    Ok(GnEstimate {
        constant: best,
        samples,
    })
}

/// `-(2^{q-1} + 1)`, the exponent of `ln N` in the unlocalized strong rate.
pub fn log_rate_exponent(q: u32) -> Result<f64> {
    if q < 3 {
        return Err(Error::Analysis(format!("log-rate envelope needs q >= 3, got {q}")));
    }
    Ok(-((1u64 << (q - 1)) as f64 + 1.0))
}

/// `(ln N)^{-(2^{q-1}+1)}` for each `N`, unit constant.
pub fn log_rate_envelope(q: u32, meshes: &[f64]) -> Result<Vec<f64>> {
    let p = log_rate_exponent(q)?;
    if let Some(n) = meshes.iter().find(|&&n| n.is_nan() || n <= 1.0) {
        return Err(Error::Analysis(format!("log-rate envelope needs N > 1, got {n}")));
    }
    Ok(meshes.iter().map(|&n| n.ln().powf(p)).collect())
}

/// Least-squares constant `C` minimising `sum (C e_i - m_i)^2` against
/// measured unlocalized errors `m_i`.
pub fn fit_log_rate_constant(q: u32, meshes: &[f64], measured: &[f64]) -> Result<f64> {
    if meshes.len() != measured.len() || meshes.is_empty() {
        return Err(Error::Analysis("one measurement per mesh required".into()));
    }
    let env = log_rate_envelope(q, meshes)?;
    let num: f64 = env.iter().zip(measured).map(|(e, m)| e * m).sum();
    let den: f64 = env.iter().map(|e| e * e).sum();
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_at_q3() {
        assert_eq!(log_rate_exponent(3).unwrap(), -5.0);
        assert_eq!(log_rate_exponent(4).unwrap(), -9.0);
        assert!(log_rate_exponent(2).is_err());
    }

    #[test]
    fn coupling_formula() {
        let rc = RateConstants::new(0.5, 1.0, 2.0, 1.0, 0.1).unwrap();
        // 9 * 2 * 4 / 8 * max(5, 10) * 3
        assert!((rc.coupling(3.0) - 270.0).abs() < 1e-12);
    }
}
