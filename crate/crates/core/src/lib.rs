//! Numerical model of a two-laser heterodyne quantum entropy source.
//!
//! * [`sim`] integrates the coupled stochastic laser rate equations.
//! * [`detection`] turns fields into detected, filtered and digitized signals.
//! * [`analysis`] holds the statistics used to validate the samples.
//! * [`extraction`] condenses raw codes into near-uniform bits.
//! * [`pipeline`] strings them together per modulation pulse.

pub mod analysis;
pub mod detection;
pub mod error;
pub mod extraction;
pub mod rng;
pub mod numeric;
pub mod pipeline;
pub mod sim;

pub use error::{Error, Result};
