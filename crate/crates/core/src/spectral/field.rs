use rustfft::num_complex::Complex64;

use super::grid::TorusGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    Vector,
}

impl FieldKind {
    pub fn tag(self) -> u8 {
        match self {
            FieldKind::Scalar => b'S',
            FieldKind::Vector => b'V',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Scalar => "scalar",
            FieldKind::Vector => "vector",
        }
    }
}

/// Fourier representation of a real field, `f(x) = sum_k c(k) e^{i k.x}`.
///
/// Implementations store one coefficient array per component; everything
/// else (norms, pairings, multipliers) is written once against this trait.
pub trait SpectralField: Clone + Send + Sync + std::fmt::Debug {
    const KIND: FieldKind;

    fn zeros(grid: TorusGrid) -> Self;
    fn grid(&self) -> &TorusGrid;
    fn components(&self) -> &[Vec<Complex64>];
    fn components_mut(&mut self) -> &mut [Vec<Complex64>];

    /// Map into the state space: Leray projection for vector fields,
    /// identity for scalars.
    fn into_state_space(self) -> Self {
        self
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid() == other.grid() {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `self += a * other`.
    fn add_scaled(&mut self, a: f64, other: &Self) {
        for (dst, src) in self.components_mut().iter_mut().zip(other.components()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s * a;
            }
        }
    }

    fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        for c in out.components_mut() {
            for z in c.iter_mut() {
                *z *= a;
            }
        }
        out
    }

    fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(-1.0, other);
        out
    }

    /// Largest coefficient modulus over all components.
    fn max_abs(&self) -> f64 {
        self.components()
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    fn is_finite(&self) -> bool {
        self.components()
            .iter()
            .flat_map(|c| c.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Worst violation of `c(-k) = conj(c(k))`.
    fn hermitian_defect(&self) -> f64 {
        let g = *self.grid();
        let k = g.modes();
        let mut worst: f64 = 0.0;
        for c in self.components() {
            for i1 in 0..k {
                for i2 in 0..k {
                    let z = c[i1 * k + i2];
                    let w = c[g.mirror(i1) * k + g.mirror(i2)];
                    worst = worst.max((z - w.conj()).norm());
                }
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    coeffs: [Vec<Complex64>; 1],
}

impl ScalarField {
    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs: [coeffs] })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs[0]
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs[0]
    }

    /// Coefficient of signed wavenumber index `(n1, n2)`.
    pub fn coeff(&self, n1: i64, n2: i64) -> Complex64 {
        let k = self.grid.modes();
        self.coeffs[0][self.grid.slot_of(n1) * k + self.grid.slot_of(n2)]
    }

    pub fn set_coeff(&mut self, n1: i64, n2: i64, value: Complex64) {
        let k = self.grid.modes();
        let idx = self.grid.slot_of(n1) * k + self.grid.slot_of(n2);
        self.coeffs[0][idx] = value;
    }

    /// Spatial mean, i.e. the `k = 0` coefficient.
    pub fn mean(&self) -> f64 {
        self.coeffs[0][0].re
    }
}

impl SpectralField for ScalarField {
    const KIND: FieldKind = FieldKind::Scalar;

    fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            coeffs: [vec![Complex64::new(0.0, 0.0); grid.len()]],
        }
    }

    fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    fn components(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.coeffs
    }
}

/// Two-component velocity-like field. Divergence-freeness is not enforced by
/// the type; [`leray_project`](super::ops::leray_project) produces it and
/// [`VectorField::divergence_defect`] measures it.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: TorusGrid,
    coeffs: [Vec<Complex64>; 2],
}

impl VectorField {
    pub fn from_components(grid: TorusGrid, first: ScalarField, second: ScalarField) -> Result<Self> {
        if first.grid != grid || second.grid != grid {
            return Err(Error::GridMismatch);
        }
        let [a] = first.coeffs;
        let [b] = second.coeffs;
        Ok(Self { grid, coeffs: [a, b] })
    }

    pub fn component(&self, i: usize) -> ScalarField {
        ScalarField {
            grid: self.grid,
            coeffs: [self.coeffs[i].clone()],
        }
    }

    pub fn coeff(&self, component: usize, n1: i64, n2: i64) -> Complex64 {
        let k = self.grid.modes();
        self.coeffs[component][self.grid.slot_of(n1) * k + self.grid.slot_of(n2)]
    }

    pub fn set_coeff(&mut self, component: usize, n1: i64, n2: i64, value: Complex64) {
        let k = self.grid.modes();
        let idx = self.grid.slot_of(n1) * k + self.grid.slot_of(n2);
        self.coeffs[component][idx] = value;
    }

    /// `max_k |k . c(k)| / (|k| max|c|)`, zero for divergence-free fields.
    pub fn divergence_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let (k1, k2, kk) = self.grid.wavevector(idx);
            if kk == 0.0 {
                continue;
            }
            let div = self.coeffs[0][idx] * k1 + self.coeffs[1][idx] * k2;
            worst = worst.max(div.norm() / kk.sqrt());
        }
        worst / scale
    }
}

impl SpectralField for VectorField {
    const KIND: FieldKind = FieldKind::Vector;

    fn into_state_space(self) -> Self {
        super::ops::leray_project(&self)
    }

    fn zeros(grid: TorusGrid) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self {
            grid,
            coeffs: [z.clone(), z],
        }
    }

    fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    fn components(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.coeffs
    }
}
