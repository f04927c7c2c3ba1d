//! Fourier representation of periodic fields on the square torus.
//!
//! Convention: `f(x) = sum_k c(k) e^{i k.x}` with `k = 2 pi n / L`, so that
//! `||f||_{L^2}^2 = L^2 sum_k |c(k)|^2`. All norms are evaluated from the
//! coefficients.

mod fft;
mod field;
mod grid;
mod ops;
mod transform;

pub use fft::Fft2;
pub use field::{FieldKind, ScalarField, SpectralField, VectorField};
pub use grid::TorusGrid;
pub use ops::{
    apply_fractional_power, apply_multiplier, gradient_pairing, inner_product, leray_project, norm_sq, resolvent,
    sobolev_norm, sobolev_norm_sq, OperatorTag,
};
pub(crate) use ops::{inner_product_unchecked, zero};
pub use rustfft::num_complex::Complex64;
pub(crate) use transform::enforce_hermitian;
pub use transform::{to_physical, to_spectral, vector_to_physical, vector_to_spectral, Transformer};
