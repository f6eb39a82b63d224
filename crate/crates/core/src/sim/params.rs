//! Physical model parameters. Defaults are the published device values
//! converted to ns / rad units.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

/// Per-laser material and cavity constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaserParams {
    /// Linewidth enhancement factor.
    pub alpha: f64,
    /// Photon decay rate (ns⁻¹).
    pub gamma: f64,
    /// Carrier lifetime (ns).
    pub tau: f64,
    /// Spontaneous emission variance rate (ns⁻¹), 2×10⁻⁴ ps⁻¹.
    pub r_sp: f64,
}

impl Default for LaserParams {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            gamma: 150.0,
            tau: 1.0,
            r_sp: 0.2,
        }
    }
}

impl LaserParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(config_err(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(config_err(format!("tau must be > 0, got {}", self.tau)));
        }
        if !(self.r_sp >= 0.0 && self.r_sp.is_finite()) {
            return Err(config_err(format!("r_sp must be >= 0, got {}", self.r_sp)));
        }
        if !self.alpha.is_finite() {
            return Err(config_err("alpha must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingMode {
    /// Coupling uses the other laser's field at the same instant.
    Instantaneous,
    /// Coupling uses the other laser's field at `t - tau_d`.
    Delayed,
}

/// Mutual optical coupling between the two cavities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingSpec {
    /// Coupling rate κ (ns⁻¹).
    pub kappa: f64,
    /// Feedback phase ψ (rad). Folded into [0, 2π) on use.
    pub psi: f64,
    /// Feedback delay τ_d (ns).
    pub tau_d: f64,
    pub mode: CouplingMode,
}

impl Default for CouplingSpec {
    fn default() -> Self {
        Self {
            kappa: HIGH_LOSS_KAPPA,
            psi: 0.0,
            tau_d: 0.02,
            mode: CouplingMode::Instantaneous,
        }
    }
}

/// Coupling rate of the low-loss chip, read off the locking region (ns⁻¹).
pub const LOW_LOSS_KAPPA: f64 = 5.0;
/// Low-loss rate reduced by 30 dB, taken as a factor 10⁻³ on the rate.
pub const HIGH_LOSS_KAPPA: f64 = LOW_LOSS_KAPPA * 1e-3;

impl CouplingSpec {
    pub fn psi_folded(&self) -> f64 {
        let p = self.psi.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs
        if p >= TAU {
            0.0
        } else {
            p
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(config_err(format!("kappa must be >= 0, got {}", self.kappa)));
        }
        if !(self.tau_d >= 0.0 && self.tau_d.is_finite()) {
            return Err(config_err(format!("tau_d must be >= 0, got {}", self.tau_d)));
        }
        if !self.psi.is_finite() {
            return Err(config_err("psi must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChirpReset {
    /// Chirp clock restarts at every modulation-cycle start.
    PerCycle,
    /// Chirp clock runs on absolute simulation time.
    Never,
}

/// Detuning of laser 2 relative to laser 1, with a linear thermal chirp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetuningSpec {
    /// Initial angular detuning Ω (rad/ns).
    pub omega: f64,
    /// Angular chirp rate β₀ (rad/ns²); 2π × 1 MHz/ns = 2π × 10⁻³ rad/ns².
    pub beta0: f64,
    pub chirp_reset: ChirpReset,
}

impl Default for DetuningSpec {
    fn default() -> Self {
        Self {
            omega: TAU * 2.0,
            beta0: TAU * 1e-3,
            chirp_reset: ChirpReset::PerCycle,
        }
    }
}

impl DetuningSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.omega.is_finite() {
            return Err(config_err("omega must be finite"));
        }
        if !(self.beta0 >= 0.0 && self.beta0.is_finite()) {
            return Err(config_err(format!("beta0 must be >= 0, got {}", self.beta0)));
        }
        Ok(())
    }
}

/// Angular detuning term Ω + β₀·t_ref applied to laser 2 (rad/ns).
///
/// `t` is absolute time and `cycle_start` the start of the cycle containing
/// it; the reference time is `t - cycle_start` with per-cycle reset and `t`
/// otherwise.
pub fn chirp_detuning(t: f64, cycle_start: f64, spec: &DetuningSpec) -> f64 {
    let t_ref = match spec.chirp_reset {
        ChirpReset::PerCycle => t - cycle_start,
        ChirpReset::Never => t,
    };
    spec.omega + spec.beta0 * t_ref
}

/// Detuning phase accumulated by laser 2 between `cycle_start` and `t`:
/// the integral of [`chirp_detuning`] over that interval (rad).
pub fn accumulated_detuning(t: f64, cycle_start: f64, spec: &DetuningSpec) -> f64 {
    let dt = t - cycle_start;
    match spec.chirp_reset {
        ChirpReset::PerCycle => spec.omega * dt + 0.5 * spec.beta0 * dt * dt,
        ChirpReset::Never => spec.omega * dt + 0.5 * spec.beta0 * (t * t - cycle_start * cycle_start),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PumpMode {
    Cw,
    GainSwitched,
}

/// Normalized pump drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PumpSpec {
    pub mode: PumpMode,
    /// Peak (gain-switched) or constant (CW) normalized pump.
    pub p_bar: f64,
    /// Current pulse duration Δτ (ns).
    pub delta_tau: f64,
    /// Super-Gaussian order M.
    pub m: u32,
    /// Modulation period (ns).
    pub t_mod: f64,
}

impl Default for PumpSpec {
    fn default() -> Self {
        Self {
            mode: PumpMode::GainSwitched,
            p_bar: 8.0,
            delta_tau: 5.0,
            m: 5,
            t_mod: 15.0,
        }
    }
}

impl PumpSpec {
    pub fn cw(p_bar: f64) -> Self {
        Self {
            mode: PumpMode::Cw,
            p_bar,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.p_bar.is_finite() {
            return Err(config_err("p_bar must be finite"));
        }
        if !(self.t_mod > 0.0 && self.t_mod.is_finite()) {
            return Err(config_err(format!("t_mod must be > 0, got {}", self.t_mod)));
        }
        if self.mode == PumpMode::GainSwitched {
            if !(self.delta_tau > 0.0 && self.delta_tau < self.t_mod) {
                return Err(config_err(format!(
                    "delta_tau must lie in (0, t_mod), got {} with t_mod {}",
                    self.delta_tau, self.t_mod
                )));
            }
            if self.m < 1 {
                return Err(config_err("super-Gaussian order m must be >= 1"));
            }
        }
        Ok(())
    }
}

/// Normalized pump at in-cycle time `t_in_cycle` ∈ [−t_mod/2, t_mod/2],
/// with the current pulse centered at 0.
pub fn pump_value(t_in_cycle: f64, spec: &PumpSpec) -> f64 {
    match spec.mode {
        PumpMode::Cw => spec.p_bar,
        PumpMode::GainSwitched => {
            let x = (t_in_cycle / spec.delta_tau).abs();
            let shape = (-x.powi(2 * spec.m as i32)).exp();
            spec.p_bar * (-0.5 + 1.5 * shape)
        }
    }
}

/// Normalized pump from the current-density ratio x = J/J_th, given the
/// product of differential gain and threshold density.
pub fn pump_from_current_ratio(x: f64, g_n: f64, n0: f64) -> f64 {
    g_n * n0 * (x - 1.0) / 2.0
}

/// Half-width of the Adler locking range, 2κ (rad/ns).
pub fn adler_lock_range(kappa: f64) -> f64 {
    2.0 * kappa
}

/// Result of checking the instantaneous-coupling approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingValidity {
    pub valid: bool,
    /// τ_d·κ
    pub delay_product: f64,
    /// 1/√(1+α²)
    pub bound: f64,
}

impl CouplingValidity {
    pub fn margin(&self) -> f64 {
        self.bound - self.delay_product
    }
}

/// The delay may be dropped from the coupling term when τ_d·κ < 1/√(1+α²).
pub fn validate_instantaneous_coupling(coupling: &CouplingSpec, alpha: f64) -> CouplingValidity {
    let delay_product = coupling.tau_d * coupling.kappa;
    let bound = 1.0 / (1.0 + alpha * alpha).sqrt();
    CouplingValidity {
        valid: delay_product < bound,
        delay_product,
        bound,
    }
}

/// Time of the nearly-zero-detuning point, measured on the chirp clock.
///
/// Only meaningful when Ω and β₀ have opposite signs.
pub fn nzd_time(spec: &DetuningSpec) -> Option<f64> {
    if spec.beta0 > 0.0 && spec.omega < 0.0 {
        Some(-spec.omega / spec.beta0)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pump_peak_tail_and_edge() {
        let spec = PumpSpec::default();
        assert_eq!(pump_value(0.0, &spec), 8.0);
        assert!((pump_value(spec.t_mod / 2.0, &spec) + 4.0).abs() < 1e-6);
        assert!((pump_value(-spec.t_mod / 2.0, &spec) + 4.0).abs() < 1e-6);
        // 8·(−0.5 + 1.5/e), independent evaluation
        assert!((pump_value(5.0, &spec) - 0.414_553_294_057_308).abs() < 1e-12);
        assert!((pump_value(-5.0, &spec) - 0.414_553_294_057_308).abs() < 1e-12);
    }

    #[test]
    fn cw_pump_is_constant() {
        let spec = PumpSpec::cw(3.5);
        for t in [-7.0, 0.0, 2.0] {
            assert_eq!(pump_value(t, &spec), 3.5);
        }
    }

    #[test]
    fn accumulated_detuning_integrates_the_chirp() {
        for reset in [ChirpReset::PerCycle, ChirpReset::Never] {
            let spec = DetuningSpec {
                omega: 3.0,
                beta0: 0.7,
                chirp_reset: reset,
            };
            let (c, t) = (30.0, 34.5);
            // midpoint rule is exact for a linear integrand
            let n = 1000;
            let h = (t - c) / n as f64;
            let quad: f64 = (0..n).map(|i| chirp_detuning(c + (i as f64 + 0.5) * h, c, &spec) * h).sum();
            assert!((accumulated_detuning(t, c, &spec) - quad).abs() < 1e-9);
        }
    }

    #[test]
    fn chirp_examples() {
        let flat = DetuningSpec {
            omega: 10.0,
            beta0: 0.0,
            chirp_reset: ChirpReset::PerCycle,
        };
        assert_eq!(chirp_detuning(123.0, 120.0, &flat), 10.0);

        let table = DetuningSpec {
            omega: 0.0,
            beta0: TAU * 1e-3,
            chirp_reset: ChirpReset::PerCycle,
        };
        let v = chirp_detuning(35.0, 30.0, &table);
        assert!((v - TAU * 5e-3).abs() < 1e-15);

        let reset = DetuningSpec {
            omega: 6.0,
            beta0: 2.0,
            chirp_reset: ChirpReset::PerCycle,
        };
        assert_eq!(chirp_detuning(3.0, 3.0, &reset), 6.0);

        let absolute = DetuningSpec {
            chirp_reset: ChirpReset::Never,
            ..reset
        };
        assert_eq!(chirp_detuning(3.0, 3.0, &absolute), 12.0);
    }

    #[test]
    fn instantaneous_coupling_examples() {
        let mut c = CouplingSpec {
            kappa: 5.0,
            tau_d: 0.02,
            ..CouplingSpec::default()
        };
        let v = validate_instantaneous_coupling(&c, 2.0);
        assert!(v.valid);
        assert!((v.delay_product - 0.1).abs() < 1e-15);
        assert!((v.bound - 1.0 / 5f64.sqrt()).abs() < 1e-15);

        c.kappa = 0.0;
        for (tau_d, alpha) in [(0.0, 0.0), (10.0, 5.0), (1e3, -3.0)] {
            c.tau_d = tau_d;
            assert!(validate_instantaneous_coupling(&c, alpha).valid);
        }

        c.kappa = 50.0;
        c.tau_d = 0.02;
        let v = validate_instantaneous_coupling(&c, 2.0);
        assert!(!v.valid);
        assert!((v.delay_product - 1.0).abs() < 1e-12);
        assert!(v.margin() < 0.0);
    }

    #[test]
    fn adler_examples() {
        assert_eq!(adler_lock_range(5.0), 10.0);
        assert_eq!(adler_lock_range(0.0), 0.0);
        assert!((adler_lock_range(HIGH_LOSS_KAPPA) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn pump_from_current_ratio_examples() {
        assert_eq!(pump_from_current_ratio(1.0, 3.0, 7.0), 0.0);
        assert_eq!(pump_from_current_ratio(2.0, 4.0, 4.0), 8.0);
        assert_eq!(pump_from_current_ratio(0.5, 16.0, 1.0), -4.0);
    }

    #[test]
    fn psi_folding() {
        let c = |psi| CouplingSpec {
            psi,
            ..CouplingSpec::default()
        };
        assert!((c(-PI / 2.0).psi_folded() - 1.5 * PI).abs() < 1e-12);
        assert!((c(5.0 * PI).psi_folded() - PI).abs() < 1e-12);
        let tiny = c(-1e-18).psi_folded();
        assert!((0.0..TAU).contains(&tiny));
    }

    #[test]
    fn validation_rejects_bad_values() {
        let bad = LaserParams {
            gamma: 0.0,
            ..LaserParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = PumpSpec {
            delta_tau: 20.0,
            ..PumpSpec::default()
        };
        assert!(bad.validate().is_err());
        let bad = DetuningSpec {
            beta0: -1.0,
            ..DetuningSpec::default()
        };
        assert!(bad.validate().is_err());
    }
}
