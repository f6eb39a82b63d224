//! Per-pulse streaming from laser fields to digitized samples.
//!
//! Cycles are integrated independently (in parallel, block by block) and
//! then fed in cycle order through one [`DetectionChain`], whose filter state
//! runs on across cycle boundaries like a real receiver. Each cycle yields
//! an in-pulse sample, an off-pulse (noise reference) sample and a fitted
//! beat phase. Amplifier noise for cycle `k` comes from that cycle's own
//! stream, so results do not depend on the block size.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::analysis::{extract_pulse_phase, PhaseBatch};
use crate::detection::{
    sample_at, AnalogTrace, DetectionChain, DetectionConfig, Quantizer, SampleBatch, SamplingPolicy,
};
use crate::error::{Error, Result};
use crate::rng::{cycle_stream, SLOT_AMPLIFIER};
use crate::sim::{accumulated_detuning, SimConfig, SimPlan, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub detection: DetectionConfig,
    /// In-pulse sampling point and warm-up.
    pub sampling: SamplingPolicy,
    /// Offset of the off-pulse noise-reference sample within the cycle (ns).
    pub off_pulse_delay: f64,
    /// Width of the phase-fit window centred on the sampling point (ns).
    pub phase_window: f64,
    /// Analyzed cycles whose in-pulse windows set the digitizer full scale.
    pub calibration_cycles: usize,
    /// Cycles integrated per parallel block.
    pub block_cycles: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            detection: DetectionConfig::default(),
            sampling: SamplingPolicy {
                warmup_cycles: 2,
                ..SamplingPolicy::default()
            },
            off_pulse_delay: 0.5,
            phase_window: 1.2,
            calibration_cycles: 200,
            block_cycles: 32,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self, sim: &SimConfig) -> Result<()> {
        let t_mod = sim.cycle_period();
        self.sampling.validate(t_mod)?;
        SamplingPolicy {
            delay: self.off_pulse_delay,
            ..self.sampling
        }
        .validate(t_mod)?;
        let half = 0.5 * self.phase_window;
        if !(self.phase_window > 0.0 && self.sampling.delay - half >= 0.0 && self.sampling.delay + half < t_mod)
        {
            return Err(Error::Config(format!(
                "phase window of {} ns around {} ns does not fit in the {} ns cycle",
                self.phase_window, self.sampling.delay, t_mod
            )));
        }
        if self.block_cycles == 0 {
            return Err(Error::Config("block_cycles must be >= 1".into()));
        }
        if self.calibration_cycles == 0 {
            return Err(Error::Config("calibration_cycles must be >= 1".into()));
        }
        let interval = sim.grid.dt * sim.grid.record_stride as f64;
        self.detection.validate(interval)
    }
}

/// Everything measured on a run of pulses.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseOutput {
    /// In-pulse samples with fitted phases and digitizer codes.
    pub in_pulse: SampleBatch,
    /// Off-pulse samples, same cycles.
    pub off_pulse: Vec<f64>,
    pub quantizer: Quantizer,
    pub clipped_low: usize,
    pub clipped_high: usize,
    /// Phase fits flagged as below the noise. Phases are only fitted when
    /// the window spans at least two beat periods at the nominal detuning.
    pub low_confidence_phases: usize,
}

impl PulseOutput {
    /// Fitted beat phases, when the run fitted them.
    pub fn phases(&self) -> Option<PhaseBatch> {
        self.in_pulse.phases.clone().map(PhaseBatch::new)
    }

    pub fn codes(&self) -> &[u16] {
        self.in_pulse.codes.as_deref().unwrap_or(&[])
    }
}

/// Runs the detection chain over one cycle's trajectory.
fn detect_cycle(
    chain: &mut DetectionChain,
    traj: &Trajectory,
    seed: u64,
    buf: &mut Vec<f64>,
) -> AnalogTrace {
    chain.photocurrent(&traj.e1, &traj.e2, buf);
    let mut rng = cycle_stream(seed, traj.first_cycle, SLOT_AMPLIFIER);
    chain.process(buf, &mut rng);
    AnalogTrace {
        t0: traj.t0,
        interval: traj.record_interval(),
        values: std::mem::take(buf),
    }
}

/// Detected trace of a contiguous trajectory (e.g. from
/// [`SimPlan::simulate`]), with amplifier noise drawn per cycle.
pub fn detect_trajectory(sim: &SimConfig, detection: &DetectionConfig, traj: &Trajectory) -> Result<AnalogTrace> {
    let interval = traj.record_interval();
    let mut chain = DetectionChain::new(detection, interval)?;
    let mut values = Vec::with_capacity(traj.len());
    let mut buf = Vec::new();
    let bounds: Vec<usize> = traj.cycle_starts.iter().copied().chain([traj.len()]).collect();
    for (c, w) in bounds.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        chain.photocurrent(&traj.e1[a..b], &traj.e2[a..b], &mut buf);
        let mut rng = cycle_stream(sim.grid.seed, traj.first_cycle + c as u64, SLOT_AMPLIFIER);
        chain.process(&mut buf, &mut rng);
        values.extend_from_slice(&buf);
    }
    AnalogTrace::new(traj.t0, interval, values)
}

/// Simulates `warmup + n_pulses` independent cycles and reduces each to its
/// samples. `sim.grid.n_cycles` is ignored.
pub fn run_pulses(sim: &SimConfig, pipe: &PipelineConfig, n_pulses: usize) -> Result<PulseOutput> {
    run_pulses_with(sim, pipe, n_pulses, |_, _| {})
}

/// As [`run_pulses`], also handing every analyzed cycle's detected trace to
/// `inspect` together with its cycle index.
pub fn run_pulses_with<F>(sim: &SimConfig, pipe: &PipelineConfig, n_pulses: usize, mut inspect: F) -> Result<PulseOutput>
where
    F: FnMut(u64, &AnalogTrace),
{
    pipe.validate(sim)?;
    if n_pulses == 0 {
        return Err(Error::InsufficientData("no pulses requested".into()));
    }
    let plan = SimPlan::new(sim)?;
    let interval = plan.record_interval();
    let t_mod = plan.cycle_period();
    let warmup = pipe.sampling.warmup_cycles as u64;
    let total = warmup + n_pulses as u64;
    let seed = sim.grid.seed;
    let half = 0.5 * pipe.phase_window;

    let mut chain = DetectionChain::new(&pipe.detection, interval)?;
    let mut in_pulse = Vec::with_capacity(n_pulses);
    let mut off_pulse = Vec::with_capacity(n_pulses);
    let mut phases = Vec::with_capacity(n_pulses);
    let mut low_confidence = 0;
    // decided on the first analyzed cycle: the window must span two beat periods
    let mut fit_phases: Option<bool> = None;
    let mut calibration = Vec::new();
    let mut buf = Vec::new();

    let mut next = 0u64;
    while next < total {
        let end = (next + pipe.block_cycles as u64).min(total);
        let block = plan.simulate_cycles(next..end)?;
        for traj in &block {
            let cycle = traj.first_cycle;
            let trace = detect_cycle(&mut chain, traj, seed, &mut buf);
            if cycle >= warmup {
                let start = cycle as f64 * t_mod;
                let t_s = start + pipe.sampling.delay;
                let missing = |t: f64| Error::InsufficientData(format!("cycle {cycle} has no sample at {t} ns"));
                let x = sample_at(&trace, t_s, pipe.sampling.interpolation).ok_or_else(|| missing(t_s))?;
                in_pulse.push(x);
                let t_off = start + pipe.off_pulse_delay;
                off_pulse.push(sample_at(&trace, t_off, pipe.sampling.interpolation).ok_or_else(|| missing(t_off))?);
                let window = trace.window(t_s - half, t_s + half);
                let theta = |t| accumulated_detuning(t, start, &sim.detuning);
                if fit_phases.is_none() {
                    let span = (theta(t_s + half) - theta(t_s - half)).abs();
                    fit_phases = Some(span >= 2.0 * TAU);
                }
                if fit_phases == Some(true) {
                    let fit = extract_pulse_phase(&window, theta)?;
                    if !fit.confident {
                        low_confidence += 1;
                    }
                    phases.push(fit.phase);
                }
                if cycle - warmup < pipe.calibration_cycles as u64 {
                    calibration.extend_from_slice(&window.values);
                }
                inspect(cycle, &trace);
            }
            buf = trace.values;
        }
        next = end;
    }

    let quantizer = pipe.detection.digitizer.quantizer(&calibration)?;
    let (mut clipped_low, mut clipped_high) = (0, 0);
    let codes = in_pulse
        .iter()
        .map(|&v| {
            if v < quantizer.v_min {
                clipped_low += 1;
            } else if v > quantizer.v_max {
                clipped_high += 1;
            }
            quantizer.code(v)
        })
        .collect();
    let in_pulse = SampleBatch {
        first_cycle: warmup,
        values: in_pulse,
        phases: (fit_phases == Some(true)).then_some(phases),
        codes: Some(codes),
    };
    Ok(PulseOutput {
        in_pulse,
        off_pulse,
        quantizer,
        clipped_low,
        clipped_high,
        low_confidence_phases: low_confidence,
    })
}
