//! Numerics for positive definiteness of exp(−‖x‖_q^β) on ℓ_q^n: γ_q, its
//! moments, radial Fourier transforms of ‖x‖_q^β, Gram-matrix checks and
//! sampling of stable and Gaussian measures.

pub mod acceptance;
pub mod bochner;
pub mod cli;
pub mod error;
pub mod gammaq;
pub mod measures;
pub mod quad;
pub mod radialft;
pub mod rng;
pub mod specfun;

pub use error::{Error, Result};
