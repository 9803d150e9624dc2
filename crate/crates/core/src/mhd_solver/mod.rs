//! Integrating-factor time stepper, Picard solver on the integral form,
//! frequency splitting and the continuation loop.

mod checkpoint;
mod config;
mod continuation;
mod picard;
mod stepper;
mod trajectory;

pub use checkpoint::{read_checkpoint, write_checkpoint, CheckpointHeader};
pub use config::{measured_c0, SolverConfig, C0_SAFETY};
pub use continuation::{
    continuation_solve, local_existence_time, smallness_threshold, split_frequency,
    split_tolerance, ContinuationReport, Segment,
};
pub use picard::{picard_solve, PicardDiagnostics};
pub use stepper::{integrate, stability_bound, Stepper, ADMISSIBLE_TOL};
pub(crate) use trajectory::Recorder;
pub use trajectory::Trajectory;
