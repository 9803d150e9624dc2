//! Grid, transforms, Leray projection and the dealiased MHD nonlinearity.

mod field;
mod grid;
mod ops;
pub(crate) mod transform;

pub use field::{Spectral, SpectralField, StatePair, VectorField};
pub use grid::Grid;
pub use ops::{
    advect, dealias, divergence, gradient, inner_product, leray_project, nonlinear_rhs,
    quadratic_terms, Coupling,
};
pub use transform::{from_physical, to_physical};

#[cfg(test)]
mod tests;
