//! Coupled stochastic rate-equation model of the CW / gain-switched laser
//! pair.

mod history;
mod integrator;
mod params;
mod trajectory;

pub use history::DelayLine;
pub use integrator::{
    lk_step, Drive, Integrator, LaserPairState, LkModel, SimConfig, SimGrid, SimPlan,
};
pub use params::{
    accumulated_detuning, adler_lock_range, chirp_detuning, nzd_time, pump_from_current_ratio, pump_value,
    validate_instantaneous_coupling, ChirpReset, CouplingMode, CouplingSpec, CouplingValidity,
    DetuningSpec, LaserParams, PumpMode, PumpSpec, HIGH_LOSS_KAPPA, LOW_LOSS_KAPPA,
};
pub use trajectory::Trajectory;
