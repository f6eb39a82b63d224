//! CW–CW detuning sweep: which detunings pull the two lasers into lock.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use qes_core::analysis::{beat_frequency_from_fields, lock_classify, LockInput};
use qes_core::pipeline::detect_trajectory;
use qes_core::rng::derive_seed;
use qes_core::sim::{adler_lock_range, PumpSpec, SimConfig, SimPlan};
use qes_core::Result;

use crate::config::{ExperimentConfig, LockingMapConfig};
use crate::output::{write_gnuplot, CsvWriter, Field};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LockingPoint {
    /// Ω (rad/ns).
    pub omega: f64,
    pub locked: bool,
    /// Mean beat frequency from the optical fields (GHz); ≈ 0 when locked.
    pub beat_frequency: f64,
    /// Strongest line of the detected spectrum (GHz).
    pub peak_frequency: Option<f64>,
    /// Its height over the local spectral floor.
    pub peak_ratio: f64,
}

/// Contiguous run of locked grid points around Ω = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LockWindow {
    pub omega_low: f64,
    pub omega_high: f64,
    pub points: usize,
    /// Locked points times the grid step (rad/ns).
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LockingMap {
    pub kappa: f64,
    pub points: Vec<LockingPoint>,
    pub window: Option<LockWindow>,
    /// 2·(2κ), the full width of the Adler range.
    pub adler_width: f64,
}

impl LockingMap {
    pub fn locked_count(&self) -> usize {
        self.points.iter().filter(|p| p.locked).count()
    }
}

pub fn omega_grid(cfg: &LockingMapConfig) -> Vec<f64> {
    let n = cfg.points;
    let step = 2.0 * cfg.omega_max / (n - 1) as f64;
    (0..n).map(|i| -cfg.omega_max + step * i as f64).collect()
}

/// Both lasers CW at their configured pump levels, coupled at the sweep's κ,
/// with a fixed detuning and no chirp.
pub fn point_config(base: &SimConfig, lm: &LockingMapConfig, omega: f64, seed: u64) -> SimConfig {
    let mut sim = base.clone();
    sim.pump2 = PumpSpec {
        t_mod: base.pump2.t_mod,
        ..PumpSpec::cw(base.pump2.p_bar)
    };
    sim.coupling.kappa = lm.kappa;
    sim.coupling.mode = lm.coupling_mode;
    sim.detuning.omega = omega;
    sim.detuning.beta0 = 0.0;
    sim.grid.seed = seed;
    sim.grid.n_cycles = ((lm.settle + lm.duration) / sim.cycle_period()).ceil() as u64;
    sim
}

fn run_point(cfg: &ExperimentConfig, omega: f64, index: usize) -> Result<LockingPoint> {
    let lm = &cfg.locking_map;
    let seed = derive_seed(cfg.experiment_seed(), "omega", index as u64);
    let sim = point_config(&cfg.sim, lm, omega, seed);
    let traj = SimPlan::new(&sim)?.simulate()?;
    let trace = detect_trajectory(&sim, &cfg.pipeline.detection, &traj)?;
    let analyzed = trace.window(lm.settle, trace.end_time() + trace.interval);
    let lock = lock_classify(LockInput::CwTrace(&analyzed), &lm.thresholds)?;
    let first = ((lm.settle - traj.t0) / traj.record_interval()).ceil().max(0.0) as usize;
    let beat = beat_frequency_from_fields(&traj.e1[first..], &traj.e2[first..], traj.record_interval())?;
    Ok(LockingPoint {
        omega,
        locked: lock.locked,
        beat_frequency: beat,
        peak_frequency: lock.peak_frequency,
        peak_ratio: lock.metric,
    })
}

/// Index range of the locked run containing the grid point closest to Ω = 0.
pub fn central_window(points: &[LockingPoint], step: f64) -> Option<LockWindow> {
    let zero = points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.omega.abs().total_cmp(&b.1.omega.abs()))?
        .0;
    if !points[zero].locked {
        return None;
    }
    let mut lo = zero;
    while lo > 0 && points[lo - 1].locked {
        lo -= 1;
    }
    let mut hi = zero;
    while hi + 1 < points.len() && points[hi + 1].locked {
        hi += 1;
    }
    let n = hi - lo + 1;
    Some(LockWindow {
        omega_low: points[lo].omega,
        omega_high: points[hi].omega,
        points: n,
        width: n as f64 * step,
    })
}

pub fn run_locking_map(cfg: &ExperimentConfig) -> Result<LockingMap> {
    let lm = &cfg.locking_map;
    let grid = omega_grid(lm);
    let points = grid
        .par_iter()
        .enumerate()
        .map(|(i, &omega)| run_point(cfg, omega, i))
        .collect::<Result<Vec<_>>>()?;
    let step = 2.0 * lm.omega_max / (lm.points - 1) as f64;
    Ok(LockingMap {
        kappa: lm.kappa,
        window: central_window(&points, step),
        points,
        adler_width: 2.0 * adler_lock_range(lm.kappa),
    })
}

pub fn write_locking_map(map: &LockingMap, dir: &Path, plot: bool) -> Result<()> {
    let mut w = CsvWriter::create(
        &dir.join("locking_map.csv"),
        &[
            "omega_rad_per_ns",
            "locked",
            "beat_frequency_ghz",
            "spectral_peak_ghz",
            "peak_to_floor_ratio",
        ],
    )?;
    for p in &map.points {
        w.row(&[
            Field::F(p.omega),
            Field::B(p.locked),
            Field::F(p.beat_frequency),
            Field::Opt(p.peak_frequency),
            Field::F(p.peak_ratio),
        ])?;
    }
    w.finish()?;
    if plot {
        write_gnuplot(
            &dir.join("locking_map.gp"),
            "locking_map.csv",
            "detuning (rad/ns)",
            "beat frequency (GHz)",
            &[(1, 3, "beat frequency")],
            "linespoints",
        )?;
    }
    Ok(())
}
