use rustfft::num_complex::Complex64;

use super::field::{FieldKind, SpectralField, VectorField};
use crate::error::{Error, Result};

/// Which dissipative operator a multiplier stands for. Both have symbol
/// `|k|^2`; the Stokes operator is only meaningful on divergence-free
/// vector fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorTag {
    Stokes,
    Laplacian,
}

impl OperatorTag {
    fn check<F: SpectralField>(self) -> Result<()> {
        match (self, F::KIND) {
            (OperatorTag::Stokes, FieldKind::Scalar) => Err(Error::OperatorMismatch {
                op: "Stokes",
                kind: "scalar",
            }),
            _ => Ok(()),
        }
    }
}

/// Multiply every coefficient by `symbol(|k|^2)`.
pub fn apply_multiplier<F: SpectralField>(f: &F, symbol: impl Fn(f64) -> f64) -> F {
    let grid = *f.grid();
    let mut out = f.clone();
    for c in out.components_mut() {
        for (idx, z) in c.iter_mut().enumerate() {
            let (_, _, kk) = grid.wavevector(idx);
            *z *= symbol(kk);
        }
    }
    out
}

/// `Pi f`: removes the gradient part mode by mode; the mean passes through.
pub fn leray_project(f: &VectorField) -> VectorField {
    let grid = *f.grid();
    let mut out = f.clone();
    let [a, b] = out.components_mut() else { unreachable!() };
    for idx in 0..grid.len() {
        let (k1, k2, kk) = grid.wavevector(idx);
        if kk == 0.0 {
            continue;
        }
        let dot = (a[idx] * k1 + b[idx] * k2) / kk;
        a[idx] -= dot * k1;
        b[idx] -= dot * k2;
    }
    out
}

/// `A^s f` (or `Ã^s f`) with symbol `|k|^{2s}`.
///
/// The mean is annihilated for `s > 0`, kept for `s = 0`, and must vanish for
/// `s < 0`.
pub fn apply_fractional_power<F: SpectralField>(f: &F, op: OperatorTag, s: f64) -> Result<F> {
    op.check::<F>()?;
    if s == 0.0 {
        return Ok(f.clone());
    }
    if s < 0.0 {
        let scale = f.max_abs();
        let mean = f.components().iter().fold(0.0_f64, |m, c| m.max(c[0].norm()));
        if mean > 1e-13 * scale {
            return Err(Error::NonzeroMean);
        }
    }
    Ok(apply_multiplier(f, |kk| if kk == 0.0 { 0.0 } else { kk.powf(s) }))
}

/// `(I + lambda A)^{-1} f`.
pub fn resolvent<F: SpectralField>(f: &F, lambda: f64, op: OperatorTag) -> Result<F> {
    op.check::<F>()?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "resolvent parameter must be positive, got {lambda}"
        )));
    }
    Ok(apply_multiplier(f, |kk| 1.0 / (1.0 + lambda * kk)))
}

/// `||A^{s/2} f||^2`; the mean contributes only at `s = 0`.
pub fn sobolev_norm_sq<F: SpectralField>(f: &F, s: f64) -> f64 {
    let grid = *f.grid();
    let area = grid.length() * grid.length();
    let mut total = 0.0;
    for c in f.components() {
        for (idx, z) in c.iter().enumerate() {
            let (_, _, kk) = grid.wavevector(idx);
            let w = if kk == 0.0 {
                if s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else if s == 0.0 {
                1.0
            } else if s == 1.0 {
                kk
            } else {
                kk.powf(s)
            };
            total += w * z.norm_sqr();
        }
    }
    total * area
}

pub fn sobolev_norm<F: SpectralField>(f: &F, s: f64) -> f64 {
    sobolev_norm_sq(f, s).sqrt()
}

/// `||f||_{L^2}^2`.
pub fn norm_sq<F: SpectralField>(f: &F) -> f64 {
    sobolev_norm_sq(f, 0.0)
}

/// Real `L^2(D)` pairing.
pub fn inner_product<F: SpectralField>(f: &F, g: &F) -> Result<f64> {
    f.same_grid(g)?;
    Ok(inner_product_unchecked(f, g))
}

pub(crate) fn inner_product_unchecked<F: SpectralField>(f: &F, g: &F) -> f64 {
    let grid = f.grid();
    let area = grid.length() * grid.length();
    let mut total = 0.0;
    for (a, b) in f.components().iter().zip(g.components()) {
        total += a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum::<f64>();
    }
    total * area
}

/// `(A^{1/2} f, A^{1/2} g)`.
pub fn gradient_pairing<F: SpectralField>(f: &F, g: &F) -> f64 {
    let grid = *f.grid();
    let area = grid.length() * grid.length();
    let mut total = 0.0;
    for (a, b) in f.components().iter().zip(g.components()) {
        for (idx, (x, y)) in a.iter().zip(b).enumerate() {
            let (_, _, kk) = grid.wavevector(idx);
            total += kk * (x * y.conj()).re;
        }
    }
    total * area
}

pub(crate) fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}
