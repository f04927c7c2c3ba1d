#![allow(dead_code)]

use boussinesq::noise::seeded_rng;
use boussinesq::random::{random_field, RandomFieldSpec};
use boussinesq::spectral::Complex64;
use boussinesq::spectral::{ScalarField, SpectralField, TorusGrid, VectorField};

pub fn rand_scalar(grid: TorusGrid, seed: u64) -> ScalarField {
    let mut rng = seeded_rng(seed, 99);
    random_field(grid, &RandomFieldSpec::band_limited(&grid), &mut rng)
}

pub fn rand_vector(grid: TorusGrid, seed: u64) -> VectorField {
    let mut rng = seeded_rng(seed, 99);
    random_field(grid, &RandomFieldSpec::band_limited(&grid), &mut rng)
}

/// Direct evaluation of `sum_k c(k) e^{i k.x}` at a point, no FFT.
pub fn eval_series(field: &[Complex64], grid: &TorusGrid, x: f64, y: f64) -> f64 {
    let k = grid.modes();
    let mut s = Complex64::new(0.0, 0.0);
    for i1 in 0..k {
        for i2 in 0..k {
            let c = field[i1 * k + i2];
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ph = grid.wavenumber(grid.index_of(i1)) * x + grid.wavenumber(grid.index_of(i2)) * y;
            s += c * Complex64::new(ph.cos(), ph.sin());
        }
    }
    s.re
}

/// Spectral partial derivative `i k_axis c(k)`.
pub fn derivative(field: &[Complex64], grid: &TorusGrid, axis: usize) -> Vec<Complex64> {
    let k = grid.modes();
    (0..grid.len())
        .map(|idx| {
            let n = if axis == 0 {
                grid.index_of(idx / k)
            } else {
                grid.index_of(idx % k)
            };
            field[idx] * Complex64::new(0.0, grid.wavenumber(n))
        })
        .collect()
}

pub fn cos_x(grid: TorusGrid, amplitude: f64) -> ScalarField {
    let mut f = ScalarField::zeros(grid);
    f.set_coeff(1, 0, Complex64::new(0.5 * amplitude, 0.0));
    f.set_coeff(-1, 0, Complex64::new(0.5 * amplitude, 0.0));
    f
}

pub fn sin_x(grid: TorusGrid, amplitude: f64) -> ScalarField {
    let mut f = ScalarField::zeros(grid);
    f.set_coeff(1, 0, Complex64::new(0.0, -0.5 * amplitude));
    f.set_coeff(-1, 0, Complex64::new(0.0, 0.5 * amplitude));
    f
}

pub fn vector(grid: TorusGrid, a: ScalarField, b: ScalarField) -> VectorField {
    VectorField::from_components(grid, a, b).unwrap()
}

use boussinesq::noise::{CovarianceSpec, DiffusionSpec, ModeBasis};
use boussinesq::scheme::{Model, NoiseModel, SchemeConfig};
use boussinesq::spectral::FieldKind;

/// Model with the named diffusion preset on both equations.
pub fn model(grid: TorusGrid, nu: f64, kappa: f64, horizon: f64, steps: usize, preset: &str, sigma: f64) -> Model {
    let cov = CovarianceSpec::default();
    let noise = |kind| {
        let basis = ModeBasis::new(grid, kind, cov.count()).unwrap();
        let spec = DiffusionSpec::preset(preset, sigma, &basis).unwrap();
        NoiseModel::new(grid, kind, cov.clone(), spec).unwrap()
    };
    let scheme = SchemeConfig::new(grid, nu, kappa, horizon, steps).unwrap();
    Model::new(scheme, noise(FieldKind::Vector), noise(FieldKind::Scalar)).unwrap()
}
