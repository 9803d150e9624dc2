//! Pseudo-spectral laboratory for the 2D incompressible MHD system on the
//! periodic torus, with Fourier-Lebesgue (`χ^s`) norm diagnostics.
//!
//! Fields are Fourier series `f(x) = Σ_k c_k e^{i ξ_k·x}` with
//! `ξ_k = (2π/L) k`; the zero mode is excluded from every `χ^s` sum.

pub mod chi_norms;
pub mod error;
pub mod initial;
pub mod mhd_solver;
pub mod random;
pub mod semigroup;
pub mod spectral_core;
pub mod verification;

pub use error::{Error, Result};
pub use spectral_core::{Grid, Spectral, SpectralField, StatePair, VectorField};
