//! Pseudospectral fully implicit Euler solver for the stochastic Boussinesq
//! system on the periodic square, with tooling to measure strong and
//! in-probability convergence rates against coupled fine-mesh references.
//!
//! ```text
//! du + [nu A u + B(u,u)] dt = Pi(theta v2) dt + G(u) dW
//! dtheta + [kappa Ã theta + (u.grad) theta] dt = G~(theta) dW~
//! ```

pub mod analysis;
pub mod checkpoint;
pub mod error;
pub mod experiment;
pub mod noise;
pub mod nonlinear;
pub mod random;
pub mod scheme;
pub mod spectral;

pub use error::{Error, Result};
