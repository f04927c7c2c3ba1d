use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic square `[0, L]^2` sampled on a `K x K` grid.
///
/// Spectral arrays are stored row-major in FFT order: entry `i1 * K + i2`
/// holds the coefficient of wavenumber index `(n(i1), n(i2))` where
/// `n(i) = i` for `i <= K/2` and `i - K` otherwise. The first index is the
/// `x` direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    length: f64,
    modes: usize,
    cutoff: usize,
}

impl TorusGrid {
    /// Grid with the default 2/3-rule cutoff.
    pub fn new(modes: usize, length: f64) -> Result<Self> {
        Self::with_cutoff(modes, length, Self::default_cutoff(modes))
    }

    /// Default grid on `[0, 2pi]^2`, where index and wavenumber coincide.
    pub fn standard(modes: usize) -> Result<Self> {
        Self::new(modes, 2.0 * PI)
    }

    pub fn with_cutoff(modes: usize, length: f64, cutoff: usize) -> Result<Self> {
        if modes < 4 || !modes.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "modes per dimension must be even and >= 4, got {modes}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "side length must be positive, got {length}"
            )));
        }
        if cutoff == 0 || cutoff > modes / 2 - 1 {
            return Err(Error::InvalidGrid(format!(
                "dealias cutoff must lie in 1..={}, got {cutoff}",
                modes / 2 - 1
            )));
        }
        Ok(Self { length, modes, cutoff })
    }

    /// Largest cutoff `c` with `3c < K`, i.e. `floor(K/3)` unless `K` is a
    /// multiple of three.
    pub fn default_cutoff(modes: usize) -> usize {
        modes.saturating_sub(1) / 3
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.modes * self.modes
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Signed wavenumber index of storage index `i`.
    #[inline]
    pub fn index_of(&self, i: usize) -> i64 {
        if i <= self.modes / 2 {
            i as i64
        } else {
            i as i64 - self.modes as i64
        }
    }

    /// Storage index of signed wavenumber index `n`.
    #[inline]
    pub fn slot_of(&self, n: i64) -> usize {
        n.rem_euclid(self.modes as i64) as usize
    }

    /// Physical wavenumber `2 pi n / L`.
    #[inline]
    pub fn wavenumber(&self, n: i64) -> f64 {
        2.0 * PI * n as f64 / self.length
    }

    #[inline]
    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.modes / 2
    }

    /// Whether storage index `i` is kept by the 2/3 rule.
    #[inline]
    pub fn is_retained(&self, i: usize) -> bool {
        self.index_of(i).unsigned_abs() as usize <= self.cutoff
    }

    /// Storage index of `-k` for storage index `i`.
    #[inline]
    pub fn mirror(&self, i: usize) -> usize {
        (self.modes - i) % self.modes
    }

    /// `(k1, k2, |k|^2)` for flat index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> (f64, f64, f64) {
        let k1 = self.wavenumber(self.index_of(idx / self.modes));
        let k2 = self.wavenumber(self.index_of(idx % self.modes));
        (k1, k2, k1 * k1 + k2 * k2)
    }

    /// Physical sample coordinates `x_a = a L / K`.
    pub fn coordinate(&self, a: usize) -> f64 {
        a as f64 * self.length / self.modes as f64
    }

    /// Smallest nonzero `|k|^2` on the lattice.
    pub fn min_wavenumber_sq(&self) -> f64 {
        let k = self.wavenumber(1);
        k * k
    }

    /// Flat indices of all retained modes, in storage order.
    pub fn retained_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&idx| self.is_retained(idx / self.modes) && self.is_retained(idx % self.modes))
    }
}
