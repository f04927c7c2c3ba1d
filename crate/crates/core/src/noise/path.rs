use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::covariance::CovarianceSpec;
use crate::error::{Error, Result};

/// RNG stream ids derived from one path seed.
pub mod stream {
    pub const VELOCITY: u64 = 0;
    pub const TEMPERATURE: u64 = 1;
    pub const INITIAL_DATA: u64 = 2;
}

pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Brownian increments of a `Q`-Wiener process on the finest mesh.
///
/// Row `l` holds `W(t_{l+1}) - W(t_l)` in the eigenbasis, entry `j` being
/// `N(0, h q_j)` with `h = T / steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerPath {
    seed: u64,
    stream: u64,
    horizon: f64,
    steps: usize,
    eigenvalues: Vec<f64>,
    increments: Vec<f64>,
}

/// Increments aggregated to a coarser mesh, row-major `[steps x modes]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Increments {
    pub steps: usize,
    pub modes: usize,
    pub data: Vec<f64>,
}

impl Increments {
    pub fn row(&self, l: usize) -> &[f64] {
        &self.data[l * self.modes..(l + 1) * self.modes]
    }
}

pub fn sample_path(cov: &CovarianceSpec, steps: usize, horizon: f64, seed: u64) -> Result<WienerPath> {
    WienerPath::sample(cov, steps, horizon, seed, stream::VELOCITY)
}

impl WienerPath {
    pub fn sample(cov: &CovarianceSpec, steps: usize, horizon: f64, seed: u64, stream: u64) -> Result<Self> {
        cov.validate()?;
        if steps == 0 {
            return Err(Error::Noise("finest mesh needs at least one step".into()));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::Noise(format!("horizon must be positive, got {horizon}")));
        }
        let eigenvalues = cov.eigenvalues();
        let h = horizon / steps as f64;
        let scales: Vec<f64> = eigenvalues.iter().map(|q| (h * q).sqrt()).collect();
        let mut rng = seeded_rng(seed, stream);
        let mut increments = Vec::with_capacity(steps * scales.len());
        for _ in 0..steps {
            for s in &scales {
                let z: f64 = StandardNormal.sample(&mut rng);
                increments.push(s * z);
            }
        }
        Ok(Self {
            seed,
            stream,
            horizon,
            steps,
            eigenvalues,
            increments,
        })
    }

    /// Rebuild from stored parts (checkpoint loading).
    pub fn from_parts(
        seed: u64,
        stream: u64,
        horizon: f64,
        eigenvalues: Vec<f64>,
        increments: Vec<f64>,
    ) -> Result<Self> {
        let modes = eigenvalues.len();
        if modes == 0 || !increments.len().is_multiple_of(modes) || increments.is_empty() {
            return Err(Error::Noise("increment array does not match mode count".into()));
        }
        Ok(Self {
            seed,
            stream,
            horizon,
            steps: increments.len() / modes,
            eigenvalues,
            increments,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    pub fn increment(&self, l: usize, j: usize) -> f64 {
        self.increments[l * self.modes() + j]
    }

    /// Increments on the mesh with `steps` intervals, as sums of the
    /// `N_max / N` fine increments inside each coarse interval. For dyadic
    /// ratios the sums are formed pairwise level by level, so aggregating
    /// twice agrees bit for bit with aggregating once.
    pub fn aggregate_increments(&self, steps: usize) -> Result<Increments> {
        if steps == 0 || !self.steps.is_multiple_of(steps) {
            return Err(Error::MeshIncompatible {
                coarse: steps,
                fine: self.steps,
            });
        }
        let modes = self.modes();
        let ratio = self.steps / steps;
        let data = if ratio.is_power_of_two() {
            let mut level = self.increments.clone();
            let mut rows = self.steps;
            while rows > steps {
                let half = rows / 2;
                let mut next = Vec::with_capacity(half * modes);
                for l in 0..half {
                    let (a, b) = (&level[2 * l * modes..], &level[(2 * l + 1) * modes..]);
                    next.extend((0..modes).map(|j| a[j] + b[j]));
                }
                level = next;
                rows = half;
            }
            level
        } else {
            let mut out = vec![0.0; steps * modes];
            for l in 0..self.steps {
                let dst = (l / ratio) * modes;
                for j in 0..modes {
                    out[dst + j] += self.increments[l * modes + j];
                }
            }
            out
        };
        Ok(Increments { steps, modes, data })
    }
}

/// The independent velocity and temperature drivers of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePair {
    pub velocity: WienerPath,
    pub temperature: WienerPath,
}

impl NoisePair {
    pub fn sample(
        velocity: &CovarianceSpec,
        temperature: &CovarianceSpec,
        steps: usize,
        horizon: f64,
        seed: u64,
    ) -> Result<Self> {
        Ok(Self {
            velocity: WienerPath::sample(velocity, steps, horizon, seed, stream::VELOCITY)?,
            temperature: WienerPath::sample(temperature, steps, horizon, seed, stream::TEMPERATURE)?,
        })
    }

    pub fn seed(&self) -> u64 {
        self.velocity.seed
    }

    pub fn steps(&self) -> usize {
        self.velocity.steps
    }

    pub fn horizon(&self) -> f64 {
        self.velocity.horizon
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cov() -> CovarianceSpec {
        CovarianceSpec::power_law(2.0, 5).unwrap()
    }

    #[test]
    fn single_increment_is_standard_normal_draw() {
        let c = CovarianceSpec::finite(vec![1.0]).unwrap();
        let p = sample_path(&c, 1, 1.0, 9).unwrap();
        let mut rng = seeded_rng(9, stream::VELOCITY);
        let z: f64 = StandardNormal.sample(&mut rng);
        assert_eq!(p.increments(), &[z]);
    }

    #[test]
    fn same_seed_same_path() {
        let a = sample_path(&cov(), 64, 1.0, 3).unwrap();
        let b = sample_path(&cov(), 64, 1.0, 3).unwrap();
        assert_eq!(a, b);
        let c = sample_path(&cov(), 64, 1.0, 4).unwrap();
        assert_ne!(a.increments(), c.increments());
    }

    #[test]
    fn aggregation_identity_and_total() {
        let p = sample_path(&cov(), 64, 1.0, 11).unwrap();
        assert_eq!(p.aggregate_increments(64).unwrap().data, p.increments());
        let total = p.aggregate_increments(1).unwrap();
        for j in 0..p.modes() {
            let direct: f64 = (0..64).map(|l| p.increment(l, j)).sum();
            assert!((total.data[j] - direct).abs() < 1e-13);
        }
        assert!(matches!(
            p.aggregate_increments(48),
            Err(Error::MeshIncompatible { coarse: 48, fine: 64 })
        ));
    }

    #[test]
    fn dyadic_levels_are_bitwise_consistent() {
        let p = sample_path(&cov(), 256, 2.0, 5).unwrap();
        let fine = p.aggregate_increments(32).unwrap();
        let coarse = p.aggregate_increments(16).unwrap();
        for l in 0..16 {
            for j in 0..p.modes() {
                assert_eq!(fine.row(2 * l)[j] + fine.row(2 * l + 1)[j], coarse.row(l)[j]);
            }
        }
    }

    #[test]
    fn non_dyadic_aggregation() {
        let p = sample_path(&cov(), 60, 1.0, 5).unwrap();
        let a = p.aggregate_increments(20).unwrap();
        for j in 0..p.modes() {
            let direct = p.increment(3, j) + p.increment(4, j) + p.increment(5, j);
            assert!((a.row(1)[j] - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn velocity_and_temperature_streams_differ() {
        let pair = NoisePair::sample(&cov(), &cov(), 8, 1.0, 1).unwrap();
        assert_ne!(pair.velocity.increments(), pair.temperature.increments());
    }
}
