//! Random band-limited fields used for initial data, property checks and
//! constant certification.

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;

use crate::spectral::{enforce_hermitian, norm_sq, SpectralField, TorusGrid};

/// Options for [`random_field`].
#[derive(Debug, Clone, Copy)]
pub struct RandomFieldSpec {
    /// Target `L^2` norm of the result (ignored when zero).
    pub norm: f64,
    /// Coefficient std decays like `(1 + |n|^2)^{-decay/2}`.
    pub decay: f64,
    /// Largest `max(|n1|,|n2|)` populated; clamped to the grid cutoff.
    pub band: usize,
    pub with_mean: bool,
}

impl RandomFieldSpec {
    pub fn band_limited(grid: &TorusGrid) -> Self {
        Self {
            norm: 1.0,
            decay: 1.0,
            band: grid.cutoff(),
            with_mean: false,
        }
    }
}

/// Draw a real, band-limited field. Vector fields are Leray projected.
pub fn random_field<F: SpectralField, R: Rng + ?Sized>(grid: TorusGrid, spec: &RandomFieldSpec, rng: &mut R) -> F {
    let band = spec.band.min(grid.cutoff()) as i64;
    let k = grid.modes();
    let mut out = F::zeros(grid);
    for comp in out.components_mut() {
        for n1 in -band..=band {
            for n2 in -band..=band {
                if n1 == 0 && n2 == 0 && !spec.with_mean {
                    continue;
                }
                let sd = (1.0 + (n1 * n1 + n2 * n2) as f64).powf(-0.5 * spec.decay);
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                comp[grid.slot_of(n1) * k + grid.slot_of(n2)] = Complex64::new(re, im) * sd;
            }
        }
    }
    for comp in out.components_mut() {
        enforce_hermitian(&grid, comp);
        comp[0].im = 0.0;
    }
    let mut out = out.into_state_space();
    let n = norm_sq(&out).sqrt();
    if spec.norm > 0.0 && n > 0.0 {
        out = out.scaled(spec.norm / n);
    }
    out
}
