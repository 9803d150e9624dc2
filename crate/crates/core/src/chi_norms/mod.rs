//! `χ^s`, `L²`, `Ḣ¹`, time-mixed and tilde norms, plus the radial
//! quadrature for continuum profiles.

mod norms;
mod radial;
mod trajectory;

pub use norms::{
    chi_norm, chi_sum, combine_pair, h1_seminorm, l2_norm, pair_norm, ChannelNorms, NormReport,
};
pub use radial::{continuum_radial_chi_norm, RadialIntegral};
pub use trajectory::{trapezoid, NormRow, TrajectoryNorms, BASE_EXPONENTS};
