//! Std-side companion to `schoolchoice-core`: parallel sweeps, CSV output
//! and instance dumps.

pub mod dump;
pub mod output;
pub mod sweep;

pub use sweep::{run_sweep, SweepError, SweepOutput};
