//! Experiment drivers for the two-laser entropy-source simulator: locking
//! maps, chirped beat traces, histogram stability, autocorrelation and
//! end-to-end bit generation, all configured from TOML.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{ExperimentConfig, ExperimentKind};
pub use experiments::{run, run_experiment, write, Outcome};

use qes_core::Error;

/// Process exit status for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 2,
        Error::Divergence { .. } => 3,
        Error::LowEntropy { .. } => 4,
        _ => 1,
    }
}
