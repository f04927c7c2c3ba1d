use std::f64::consts::SQRT_2;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{FieldKind, SpectralField, TorusGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Cos,
    Sin,
}

/// One real trigonometric eigenfunction `(sqrt(2)/L) cos(k.x) e_k` (or sin),
/// with `e_k = k_perp/|k|` for vector fields and `1` for scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrigMode {
    pub n: (i64, i64),
    pub parity: Parity,
}

/// Ordered orthonormal system `zeta_j` of mean-zero real Fourier modes,
/// sorted by `|k|`, all inside the dealiased band.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBasis {
    grid: TorusGrid,
    kind: FieldKind,
    modes: Vec<TrigMode>,
}

impl ModeBasis {
    pub fn new(grid: TorusGrid, kind: FieldKind, count: usize) -> Result<Self> {
        let c = grid.cutoff() as i64;
        let mut vectors: Vec<(i64, i64)> = (-c..=c)
            .flat_map(|n1| (-c..=c).map(move |n2| (n1, n2)))
            .filter(|&(n1, n2)| n2 > 0 || (n2 == 0 && n1 > 0))
            .collect();
        vectors.sort_by_key(|&(n1, n2)| (n1 * n1 + n2 * n2, n1, n2));
        let modes: Vec<TrigMode> = vectors
            .into_iter()
            .flat_map(|n| [TrigMode { n, parity: Parity::Cos }, TrigMode { n, parity: Parity::Sin }])
            .take(count)
            .collect();
        if modes.len() < count {
            return Err(Error::Noise(format!(
                "grid with cutoff {} supports only {} real modes, {} requested",
                grid.cutoff(),
                modes.len(),
                count
            )));
        }
        if count == 0 {
            return Err(Error::Noise("empty mode list".into()));
        }
        Ok(Self { grid, kind, modes })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[TrigMode] {
        &self.modes
    }

    /// `|k_j|^2` of mode `j`.
    pub fn wavenumber_sq(&self, j: usize) -> f64 {
        let (n1, n2) = self.modes[j].n;
        let k1 = self.grid.wavenumber(n1);
        let k2 = self.grid.wavenumber(n2);
        k1 * k1 + k2 * k2
    }

    pub fn max_wavenumber_sq(&self) -> f64 {
        (0..self.len()).map(|j| self.wavenumber_sq(j)).fold(0.0, f64::max)
    }

    fn check<F: SpectralField>(&self, f: Option<&F>) -> Result<()> {
        if F::KIND != self.kind {
            return Err(Error::Noise(format!(
                "{} basis applied to a {} field",
                self.kind.name(),
                F::KIND.name()
            )));
        }
        if let Some(f) = f {
            if f.grid() != &self.grid {
                return Err(Error::GridMismatch);
            }
        }
        Ok(())
    }

    /// Coefficient of `zeta_j` at `+k` for each component; `-k` holds the conjugate.
    fn coefficient(&self, j: usize) -> [Complex64; 2] {
        let m = self.modes[j];
        let amp = SQRT_2 / self.grid.length() * 0.5;
        let z = match m.parity {
            Parity::Cos => Complex64::new(amp, 0.0),
            Parity::Sin => Complex64::new(0.0, -amp),
        };
        match self.kind {
            FieldKind::Scalar => [z, Complex64::new(0.0, 0.0)],
            FieldKind::Vector => {
                let (n1, n2) = m.n;
                let norm = ((n1 * n1 + n2 * n2) as f64).sqrt();
                [z * (-(n2 as f64) / norm), z * (n1 as f64 / norm)]
            }
        }
    }

    fn slots(&self, j: usize) -> (usize, usize) {
        let (n1, n2) = self.modes[j].n;
        let k = self.grid.modes();
        (
            self.grid.slot_of(n1) * k + self.grid.slot_of(n2),
            self.grid.slot_of(-n1) * k + self.grid.slot_of(-n2),
        )
    }

    /// `sum_j w_j zeta_j`.
    pub fn synthesize<F: SpectralField>(&self, weights: &[f64]) -> Result<F> {
        self.check::<F>(None)?;
        if weights.len() != self.len() {
            return Err(Error::Noise(format!(
                "expected {} weights, got {}",
                self.len(),
                weights.len()
            )));
        }
        let mut out = F::zeros(self.grid);
        for (j, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let coeff = self.coefficient(j);
            let (plus, minus) = self.slots(j);
            for (comp, c) in out.components_mut().iter_mut().zip(coeff) {
                comp[plus] += c * w;
                comp[minus] += c.conj() * w;
            }
        }
        Ok(out)
    }

    pub fn mode_field<F: SpectralField>(&self, j: usize) -> Result<F> {
        let mut w = vec![0.0; self.len()];
        w[j] = 1.0;
        self.synthesize(&w)
    }

    /// Coordinates `(f, zeta_j)` in `L^2(D)`.
    pub fn project<F: SpectralField>(&self, f: &F) -> Result<Vec<f64>> {
        self.check(Some(f))?;
        let area = self.grid.length() * self.grid.length();
        Ok((0..self.len())
            .map(|j| {
                let coeff = self.coefficient(j);
                let (plus, _) = self.slots(j);
                let s: f64 = f
                    .components()
                    .iter()
                    .zip(coeff)
                    .map(|(comp, c)| (comp[plus] * c.conj()).re)
                    .sum();
                2.0 * area * s
            })
            .collect())
    }
}
