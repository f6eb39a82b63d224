//! Chirped beat traces and the nearly-zero-detuning point for several
//! initial detunings.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use qes_core::detection::{estimate_nzd, instantaneous_beat_frequency, AnalogTrace, FrequencyPoint};
use qes_core::numeric::percentile_sorted;
use qes_core::pipeline::detect_trajectory;
use qes_core::rng::derive_seed;
use qes_core::sim::{nzd_time, ChirpReset, SimConfig, SimPlan, Trajectory};
use qes_core::Result;

use crate::config::{BeatTracesConfig, ExperimentConfig};
use crate::output::{write_gnuplot, CsvWriter, Field};

/// One detuning's detected record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeatRun {
    /// Ω (rad/ns).
    pub omega: f64,
    /// |Ω|/β₀ (ns after the cycle start), when Ω opposes the chirp.
    pub predicted_nzd: Option<f64>,
    /// Frequency-minimum time of each pulse, relative to its cycle start (ns).
    pub pulse_nzd: Vec<Option<f64>>,
    /// Median over the pulses that had a minimum.
    pub nzd: Option<f64>,
    #[serde(skip)]
    pub trace: AnalogTrace,
    #[serde(skip)]
    pub track: Vec<FrequencyPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeatTraces {
    /// β₀ (rad/ns²).
    pub beta0: f64,
    pub runs: Vec<BeatRun>,
}

impl BeatTraces {
    /// True when the measured NZD times increase strictly with |Ω|.
    pub fn nzd_monotonic(&self) -> bool {
        let mut pts: Vec<(f64, Option<f64>)> = self.runs.iter().map(|r| (r.omega.abs(), r.nzd)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.iter().all(|p| p.1.is_some()) && pts.windows(2).all(|w| w[1].1 > w[0].1)
    }
}

pub fn run_config(base: &SimConfig, bt: &BeatTracesConfig, omega: f64, seed: u64) -> SimConfig {
    let mut sim = base.clone();
    sim.detuning.omega = omega;
    sim.detuning.beta0 = bt.beta0;
    sim.detuning.chirp_reset = ChirpReset::PerCycle;
    sim.grid.seed = seed;
    sim.grid.n_cycles = bt.pulses as u64;
    sim
}

fn run_one(cfg: &ExperimentConfig, omega: f64, index: usize) -> Result<BeatRun> {
    let bt = &cfg.beat_traces;
    let seed = derive_seed(cfg.experiment_seed(), "omega", index as u64);
    let sim = run_config(&cfg.sim, bt, omega, seed);
    let plan = SimPlan::new(&sim)?;
    let traj = Trajectory::concat(plan.simulate_cycles(0..bt.pulses as u64)?);
    let mut detection = cfg.pipeline.detection.clone();
    detection.port = bt.port;
    let trace = detect_trajectory(&sim, &detection, &traj)?;
    let track = instantaneous_beat_frequency(&trace);
    let t_mod = sim.cycle_period();
    let (lo, hi) = bt.nzd_window;
    let predicted_nzd = nzd_time(&sim.detuning);
    // without a predicted zero crossing of the detuning there is no
    // minimum to look for
    let pulse_nzd: Vec<Option<f64>> = (0..bt.pulses)
        .map(|k| {
            let start = k as f64 * t_mod;
            predicted_nzd.and_then(|_| estimate_nzd(&track, start + lo, start + hi).map(|t| t - start))
        })
        .collect();
    let mut found: Vec<f64> = pulse_nzd.iter().flatten().copied().collect();
    found.sort_by(f64::total_cmp);
    let nzd = (!found.is_empty()).then(|| percentile_sorted(&found, 50.0));
    Ok(BeatRun {
        omega,
        predicted_nzd,
        pulse_nzd,
        nzd,
        trace,
        track,
    })
}

pub fn run_beat_traces(cfg: &ExperimentConfig) -> Result<BeatTraces> {
    let bt = &cfg.beat_traces;
    let runs = bt
        .omegas
        .par_iter()
        .enumerate()
        .map(|(i, &omega)| run_one(cfg, omega, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(BeatTraces { beta0: bt.beta0, runs })
}

pub fn write_beat_traces(bt: &BeatTraces, dir: &Path, plot: bool) -> Result<()> {
    let mut summary = CsvWriter::create(
        &dir.join("nzd.csv"),
        &["omega_rad_per_ns", "beta0_rad_per_ns2", "nzd_time_ns", "predicted_nzd_time_ns"],
    )?;
    for (i, run) in bt.runs.iter().enumerate() {
        summary.row(&[Field::F(run.omega), Field::F(bt.beta0), Field::Opt(run.nzd), Field::Opt(run.predicted_nzd)])?;

        let name = format!("beat_trace_{i}.csv");
        let mut w = CsvWriter::create(&dir.join(&name), &["time_ns", "photocurrent_au"])?;
        for (j, &v) in run.trace.values.iter().enumerate() {
            w.row(&[Field::F(run.trace.time(j)), Field::F(v)])?;
        }
        w.finish()?;

        let fname = format!("beat_frequency_{i}.csv");
        let mut w = CsvWriter::create(&dir.join(&fname), &["time_ns", "beat_frequency_ghz"])?;
        for p in &run.track {
            w.row(&[Field::F(p.t), Field::F(p.f)])?;
        }
        w.finish()?;

        if plot {
            write_gnuplot(
                &dir.join(format!("beat_trace_{i}.gp")),
                &name,
                "time (ns)",
                "photocurrent (a.u.)",
                &[(1, 2, "detected beat")],
                "lines",
            )?;
            write_gnuplot(
                &dir.join(format!("beat_frequency_{i}.gp")),
                &fname,
                "time (ns)",
                "beat frequency (GHz)",
                &[(1, 2, "zero-crossing frequency")],
                "points",
            )?;
        }
    }
    summary.finish()
}
