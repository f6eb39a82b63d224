//! Experiment drivers. Each `run_*` computes in memory; each `write_*` turns
//! the result into self-describing CSV/JSON files. [`run_experiment`] does
//! both for the configured experiment.

pub mod autocorr;
pub mod beat;
pub mod generate;
pub mod histogram;
pub mod locking;

use std::path::Path;

use serde::Serialize;

use qes_core::{Error, Result};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::output::prepare_dir;

pub use autocorr::{run_autocorr, write_autocorr, AutocorrRun};
pub use beat::{run_beat_traces, write_beat_traces, BeatRun, BeatTraces};
pub use generate::{run_generate, write_generated, Generated};
pub use histogram::{run_histogram_stability, write_histogram_stability, HistogramStability};
pub use locking::{run_locking_map, write_locking_map, LockWindow, LockingMap, LockingPoint};

/// In-memory result of any experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    LockingMap(LockingMap),
    BeatTraces(BeatTraces),
    HistogramStability(HistogramStability),
    Autocorr(AutocorrRun),
    Generate(Generated),
}

impl Outcome {
    /// One-line human summary.
    pub fn headline(&self) -> String {
        match self {
            Outcome::LockingMap(m) => match m.window {
                Some(w) => format!(
                    "locked window [{}, {}] rad/ns, width {} rad/ns (Adler 4κ = {})",
                    w.omega_low, w.omega_high, w.width, m.adler_width
                ),
                None => format!("no locked window around zero detuning ({} locked points)", m.locked_count()),
            },
            Outcome::BeatTraces(b) => {
                let t: Vec<String> = b
                    .runs
                    .iter()
                    .map(|r| r.nzd.map_or_else(|| "none".to_string(), |t| format!("{t:.3}")))
                    .collect();
                format!("NZD times (ns): {}", t.join(", "))
            }
            Outcome::HistogramStability(h) => format!(
                "{} batches, smallest pairwise KS p-value {:.4}",
                h.batches.len(),
                h.min_pairwise_p()
            ),
            Outcome::Autocorr(a) => format!(
                "n = {}, floor {:.2e}, max |rho(2..{})| = {:.3e}, normality p = {}",
                a.report.n,
                a.report.noise_floor,
                a.checked_lags,
                a.max_abs_rho,
                a.report.normality.map_or_else(|| "n/a".to_string(), |t| format!("{:.4}", t.p_value))
            ),
            Outcome::Generate(g) => format!(
                "{} bits from {} samples at {:.4} bits/sample min-entropy",
                g.metadata.output_bits, g.metadata.input_samples, g.metadata.min_entropy_per_sample
            ),
        }
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    Ok(match cfg.experiment {
        ExperimentKind::LockingMap => Outcome::LockingMap(run_locking_map(cfg)?),
        ExperimentKind::BeatTraces => Outcome::BeatTraces(run_beat_traces(cfg)?),
        ExperimentKind::HistogramStability => Outcome::HistogramStability(run_histogram_stability(cfg)?),
        ExperimentKind::Autocorr => Outcome::Autocorr(run_autocorr(cfg)?),
        ExperimentKind::Generate => Outcome::Generate(run_generate(cfg)?),
    })
}

/// Writes an outcome plus the resolved configuration and a JSON summary
/// into `dir`.
pub fn write(outcome: &Outcome, cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    let dir = prepare_dir(dir)?;
    cfg.save(&dir.join("config.toml"))?;
    let plot = cfg.plot_scripts;
    match outcome {
        Outcome::LockingMap(m) => write_locking_map(m, &dir, plot)?,
        Outcome::BeatTraces(b) => write_beat_traces(b, &dir, plot)?,
        Outcome::HistogramStability(h) => write_histogram_stability(h, &dir, plot)?,
        Outcome::Autocorr(a) => write_autocorr(a, &dir, plot)?,
        Outcome::Generate(g) => write_generated(g, cfg, &dir)?,
    }
    let summary = serde_json::to_string_pretty(outcome).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(dir.join("summary.json"), summary + "\n")?;
    Ok(())
}

/// Runs the configured experiment and writes its artifacts to `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    let outcome = run(cfg)?;
    write(&outcome, cfg, &cfg.out)?;
    Ok(outcome)
}
