//! Trace-class Wiener noise and diffusion coefficients.

mod basis;
mod covariance;
mod diffusion;
mod path;

pub use basis::{ModeBasis, Parity, TrigMode};
pub use covariance::{CovarianceSpec, EigenLaw};
pub use diffusion::{
    apply_diffusion, verify_growth_lipschitz, CertificationReport, ConstantCheck, DeclaredConstants, DiffusionFamily,
    DiffusionSpec, ModeFunctional, NormLevel,
};
pub use path::{sample_path, seeded_rng, stream, Increments, NoisePair, WienerPath};
