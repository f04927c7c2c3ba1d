use rustfft::num_complex::Complex64;

use super::fft::Fft2;
use super::field::{ScalarField, SpectralField, VectorField};
use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// Physical <-> spectral conversion on the native `K x K` grid.
///
/// The Nyquist row and column are zeroed on every forward transform.
#[derive(Debug)]
pub struct Transformer {
    grid: TorusGrid,
    fft: Fft2,
    buf: Vec<Complex64>,
}

impl Transformer {
    pub fn new(grid: TorusGrid) -> Self {
        Self {
            grid,
            fft: Fft2::new(grid.modes()),
            buf: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Samples `f(x_a, y_b)` stored at `a * K + b`.
    pub fn to_spectral(&mut self, samples: &[f64]) -> Result<ScalarField> {
        if samples.len() != self.grid.len() {
            return Err(Error::ShapeMismatch {
                expected: self.grid.len(),
                actual: samples.len(),
            });
        }
        for (z, &s) in self.buf.iter_mut().zip(samples) {
            *z = Complex64::new(s, 0.0);
        }
        self.fft.forward(&mut self.buf);
        let mut out = ScalarField::from_coeffs(self.grid, self.buf.clone())?;
        zero_nyquist(&self.grid, out.coeffs_mut());
        enforce_hermitian(&self.grid, out.coeffs_mut());
        Ok(out)
    }

    pub fn to_physical(&mut self, field: &ScalarField) -> Result<Vec<f64>> {
        if field.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        self.buf.copy_from_slice(field.coeffs());
        self.fft.inverse(&mut self.buf);
        Ok(self.buf.iter().map(|z| z.re).collect())
    }

    pub fn vector_to_spectral(&mut self, first: &[f64], second: &[f64]) -> Result<VectorField> {
        let a = self.to_spectral(first)?;
        let b = self.to_spectral(second)?;
        VectorField::from_components(self.grid, a, b)
    }

    pub fn vector_to_physical(&mut self, field: &VectorField) -> Result<[Vec<f64>; 2]> {
        Ok([
            self.to_physical(&field.component(0))?,
            self.to_physical(&field.component(1))?,
        ])
    }
}

/// One-shot forward transform; prefer a [`Transformer`] in loops.
pub fn to_spectral(samples: &[f64], grid: TorusGrid) -> Result<ScalarField> {
    Transformer::new(grid).to_spectral(samples)
}

pub fn to_physical(field: &ScalarField) -> Result<Vec<f64>> {
    Transformer::new(*field.grid()).to_physical(field)
}

pub fn vector_to_spectral(first: &[f64], second: &[f64], grid: TorusGrid) -> Result<VectorField> {
    Transformer::new(grid).vector_to_spectral(first, second)
}

pub fn vector_to_physical(field: &VectorField) -> Result<[Vec<f64>; 2]> {
    Transformer::new(*field.grid()).vector_to_physical(field)
}

pub(crate) fn zero_nyquist(grid: &TorusGrid, coeffs: &mut [Complex64]) {
    let k = grid.modes();
    let h = k / 2;
    for i in 0..k {
        coeffs[h * k + i] = Complex64::new(0.0, 0.0);
        coeffs[i * k + h] = Complex64::new(0.0, 0.0);
    }
}

/// Symmetrize `c(k)` and `conj(c(-k))` so round-off never breaks realness.
pub(crate) fn enforce_hermitian(grid: &TorusGrid, coeffs: &mut [Complex64]) {
    let k = grid.modes();
    for i1 in 0..k {
        for i2 in 0..k {
            let a = i1 * k + i2;
            let b = grid.mirror(i1) * k + grid.mirror(i2);
            if b < a {
                continue;
            }
            let avg = (coeffs[a] + coeffs[b].conj()) * 0.5;
            coeffs[a] = avg;
            coeffs[b] = avg.conj();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_has_only_mean() {
        let g = TorusGrid::standard(8).unwrap();
        let f = to_spectral(&vec![1.0; 64], g).unwrap();
        assert!((f.coeff(0, 0).re - 1.0).abs() < 1e-15);
        let rest: f64 = f.coeffs().iter().skip(1).map(|z| z.norm()).sum();
        assert!(rest < 1e-15);
    }

    #[test]
    fn single_cosine_splits_into_halves() {
        let g = TorusGrid::new(16, 3.0).unwrap();
        let mut s = vec![0.0; g.len()];
        for a in 0..16 {
            for b in 0..16 {
                s[a * 16 + b] = (2.0 * PI * g.coordinate(a) / g.length()).cos();
            }
        }
        let f = to_spectral(&s, g).unwrap();
        assert!((f.coeff(1, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((f.coeff(-1, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let total: f64 = f.coeffs().iter().map(|z| z.norm()).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_wrong_shape() {
        let g = TorusGrid::standard(8).unwrap();
        assert!(matches!(
            to_spectral(&[0.0; 10], g),
            Err(Error::ShapeMismatch {
                expected: 64,
                actual: 10
            })
        ));
    }

    #[test]
    fn nyquist_content_is_dropped() {
        let g = TorusGrid::standard(8).unwrap();
        let s: Vec<f64> = (0..64).map(|i| if (i / 8) % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let f = to_spectral(&s, g).unwrap();
        assert!(f.max_abs() < 1e-15);
    }
}
