//! Noise-subtracted autocorrelation of a long end-to-end sample sequence.

use std::path::Path;

use serde::Serialize;

use qes_core::analysis::{noise_subtracted_autocorrelation, StatsReport};
use qes_core::detection::write_sample_csv;
use qes_core::pipeline::run_pulses;
use qes_core::Result;

use crate::config::ExperimentConfig;
use crate::output::write_gnuplot;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AutocorrRun {
    pub report: StatsReport,
    /// Largest |ρ(k)| over 2 ≤ k ≤ `checked_lags`.
    pub max_abs_rho: f64,
    pub checked_lags: usize,
    #[serde(skip)]
    pub samples: Option<qes_core::detection::SampleBatch>,
}

/// Highest lag included in the headline |ρ(k)| summary.
pub const SUMMARY_MAX_LAG: usize = 100;

pub fn run_autocorr(cfg: &ExperimentConfig) -> Result<AutocorrRun> {
    let mut sim = cfg.sim.clone();
    sim.grid.seed = cfg.experiment_seed();
    let out = run_pulses(&sim, &cfg.pipeline, cfg.autocorr.pulses)?;
    let a = &cfg.analysis;
    let values = &out.in_pulse.values;
    let ns = noise_subtracted_autocorrelation(values, &out.off_pulse, a.max_lag)?;
    let mut report = StatsReport::from_samples(values, a.max_lag, a.histogram_bins, a.normality_lags)?
        .with_noise_subtracted(&ns)?
        .with_codes(out.codes(), cfg.pipeline.detection.digitizer.bits)?;
    if let Some(p) = out.phases() {
        report = report.with_phases(&p)?;
    }
    let checked_lags = SUMMARY_MAX_LAG.min(a.max_lag);
    let max_abs_rho = report.rho[2.min(report.rho.len())..=checked_lags]
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(AutocorrRun {
        report,
        max_abs_rho,
        checked_lags,
        samples: cfg.autocorr.write_samples.then_some(out.in_pulse),
    })
}

pub fn write_autocorr(run: &AutocorrRun, dir: &Path, plot: bool) -> Result<()> {
    run.report.write_text(&dir.join("report.txt"))?;
    run.report.write_autocorr_csv(&dir.join("autocorr.csv"))?;
    run.report.write_histogram_csv(&dir.join("histogram.csv"))?;
    if let Some(s) = &run.samples {
        write_sample_csv(&dir.join("samples.csv"), s)?;
    }
    if plot {
        write_gnuplot(
            &dir.join("autocorr.gp"),
            "autocorr.csv",
            "lag k (pulses)",
            "rho(k)",
            &[(1, 3, "noise-subtracted rho")],
            "impulses",
        )?;
        write_gnuplot(
            &dir.join("histogram.gp"),
            "histogram.csv",
            "sample value (a.u.)",
            "counts",
            &[(1, 3, "in-pulse samples")],
            "steps",
        )?;
    }
    Ok(())
}
