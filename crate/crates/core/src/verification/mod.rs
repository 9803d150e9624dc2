//! Numerical verification of the estimates.

pub mod calibration;
mod checks;
mod harness;
mod result;
mod runs;

pub use checks::*;
pub use harness::*;
pub use result::*;
pub use runs::*;
