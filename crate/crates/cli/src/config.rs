//! Experiment configuration: one TOML file per run.
//!
//! Every section has defaults, so a minimal file only names the experiment:
//!
//! ```toml
//! experiment = "autocorr"
//! seed = 7
//! out = "runs/autocorr"
//!
//! [autocorr]
//! pulses = 100000
//! ```

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qes_core::analysis::{LockThresholds, DEFAULT_NORMALITY_LAGS};
use qes_core::detection::Port;
use qes_core::pipeline::PipelineConfig;
use qes_core::rng::derive_seed;
use qes_core::sim::{CouplingMode, SimConfig, LOW_LOSS_KAPPA};
use qes_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    LockingMap,
    BeatTraces,
    HistogramStability,
    Autocorr,
    Generate,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::LockingMap,
        ExperimentKind::BeatTraces,
        ExperimentKind::HistogramStability,
        ExperimentKind::Autocorr,
        ExperimentKind::Generate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::LockingMap => "locking-map",
            ExperimentKind::BeatTraces => "beat-traces",
            ExperimentKind::HistogramStability => "histogram-stability",
            ExperimentKind::Autocorr => "autocorr",
            ExperimentKind::Generate => "generate",
        }
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Statistics settings shared by the sample-based experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Largest autocorrelation lag.
    pub max_lag: usize,
    /// Bins of the analog-value histogram.
    pub histogram_bins: usize,
    /// Inclusive lag range of ρ(k) fed to the normality test.
    pub normality_lags: (usize, usize),
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            max_lag: 500,
            histogram_bins: 64,
            normality_lags: DEFAULT_NORMALITY_LAGS,
        }
    }
}

/// CW–CW detuning sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LockingMapConfig {
    /// Coupling rate κ used for the sweep (ns⁻¹).
    pub kappa: f64,
    pub coupling_mode: CouplingMode,
    /// The grid spans [−omega_max, omega_max] (rad/ns).
    pub omega_max: f64,
    pub points: usize,
    /// Initial transient discarded at every grid point (ns).
    pub settle: f64,
    /// Analyzed record length after the transient (ns).
    pub duration: f64,
    pub thresholds: LockThresholds,
}

impl Default for LockingMapConfig {
    fn default() -> Self {
        Self {
            kappa: LOW_LOSS_KAPPA,
            coupling_mode: CouplingMode::Delayed,
            omega_max: 40.0,
            points: 21,
            settle: 30.0,
            duration: 60.0,
            thresholds: LockThresholds::default(),
        }
    }
}

/// Chirped beat traces for several initial detunings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeatTracesConfig {
    /// Initial detunings Ω (rad/ns). Opposite in sign to the chirp so that
    /// the instantaneous detuning passes through zero.
    pub omegas: Vec<f64>,
    /// Chirp rate β₀ (rad/ns²) replacing the simulation's value.
    pub beta0: f64,
    /// Pulses recorded per detuning.
    pub pulses: usize,
    pub port: Port,
    /// In-cycle interval searched for the frequency minimum (ns).
    pub nzd_window: (f64, f64),
}

impl Default for BeatTracesConfig {
    fn default() -> Self {
        Self {
            omegas: vec![-TAU * 6.0, -TAU * 8.0, -TAU * 10.0],
            beta0: TAU * 1.0,
            pulses: 8,
            port: Port::Balanced,
            nzd_window: (4.0, 12.5),
        }
    }
}

/// Repeated batches from one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HistogramStabilityConfig {
    pub batches: usize,
    pub batch_pulses: usize,
}

impl Default for HistogramStabilityConfig {
    fn default() -> Self {
        Self {
            batches: 6,
            batch_pulses: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AutocorrConfig {
    pub pulses: usize,
    /// Also write every in-pulse sample with its code.
    pub write_samples: bool,
}

impl Default for AutocorrConfig {
    fn default() -> Self {
        Self {
            pulses: 1_000_000,
            write_samples: false,
        }
    }
}

/// End-to-end bit generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateConfig {
    pub pulses: usize,
    /// Leading pulses used only to estimate the min-entropy.
    pub calibration_pulses: usize,
    /// Extractor input block length n (bits).
    pub block_bits: usize,
    pub epsilon: f64,
    /// Abort below this many bits of min-entropy per sample.
    pub min_entropy_floor: f64,
    /// Also write the raw digitizer codes.
    pub write_codes: bool,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        Self {
            pulses: 100_000,
            calibration_pulses: 10_000,
            block_bits: 4096,
            epsilon: 2f64.powi(-64),
            min_entropy_floor: 0.5,
            write_codes: true,
        }
    }
}

fn default_sim() -> SimConfig {
    SimConfig::table_defaults()
}

fn default_true() -> bool {
    true
}

/// A complete, self-contained experiment description.
///
/// `sim.grid.seed` is not used directly: every run derives its simulation
/// seeds from `seed` (see [`ExperimentConfig::experiment_seed`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Master seed.
    #[serde(default)]
    pub seed: u64,
    /// Output directory.
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Emit gnuplot scripts next to the CSV files.
    #[serde(default = "default_true")]
    pub plot_scripts: bool,
    #[serde(default = "default_sim")]
    pub sim: SimConfig,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub locking_map: LockingMapConfig,
    #[serde(default)]
    pub beat_traces: BeatTracesConfig,
    #[serde(default)]
    pub histogram_stability: HistogramStabilityConfig,
    #[serde(default)]
    pub autocorr: AutocorrConfig,
    #[serde(default)]
    pub generate: GenerateConfig,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    /// Defaults for `experiment`, writing to `out/<experiment>`.
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            seed: 0,
            out: default_out().join(experiment.name()),
            plot_scripts: true,
            sim: default_sim(),
            pipeline: PipelineConfig::default(),
            analysis: AnalysisConfig::default(),
            locking_map: LockingMapConfig::default(),
            beat_traces: BeatTracesConfig::default(),
            histogram_stability: HistogramStabilityConfig::default(),
            autocorr: AutocorrConfig::default(),
            generate: GenerateConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?)?;
        Ok(())
    }

    /// Seed of this experiment, derived from the master seed and the
    /// experiment name; sub-runs derive further seeds from it by tag and
    /// index, and each simulated cycle draws from its own counter-based
    /// stream below that.
    pub fn experiment_seed(&self) -> u64 {
        derive_seed(self.seed, self.experiment.name(), 0)
    }

    /// Pulse count of the selected experiment, where it has one.
    pub fn pulses(&self) -> Option<usize> {
        match self.experiment {
            ExperimentKind::LockingMap => None,
            ExperimentKind::BeatTraces => Some(self.beat_traces.pulses),
            ExperimentKind::HistogramStability => Some(self.histogram_stability.batch_pulses),
            ExperimentKind::Autocorr => Some(self.autocorr.pulses),
            ExperimentKind::Generate => Some(self.generate.pulses),
        }
    }

    /// Overrides the pulse count of the selected experiment.
    pub fn set_pulses(&mut self, n: usize) -> Result<()> {
        match self.experiment {
            ExperimentKind::LockingMap => {
                return Err(Error::Config("locking-map has no pulse count".into()));
            }
            ExperimentKind::BeatTraces => self.beat_traces.pulses = n,
            ExperimentKind::HistogramStability => self.histogram_stability.batch_pulses = n,
            ExperimentKind::Autocorr => self.autocorr.pulses = n,
            ExperimentKind::Generate => {
                self.generate.pulses = n;
                self.generate.calibration_pulses = self.generate.calibration_pulses.min(n / 2);
            }
        }
        Ok(())
    }

    /// Changes the integration step while keeping the recorded trace
    /// interval, which must stay a whole number of steps.
    pub fn set_dt(&mut self, dt: f64) -> Result<()> {
        let interval = self.sim.grid.dt * self.sim.grid.record_stride as f64;
        let ratio = interval / dt;
        let stride = ratio.round();
        if !(dt > 0.0) || stride < 1.0 || (ratio - stride).abs() > 1e-6 * stride {
            return Err(Error::Config(format!(
                "dt = {dt} ns does not divide the {interval} ns trace interval"
            )));
        }
        self.sim.grid.dt = dt;
        self.sim.grid.record_stride = stride as usize;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.seed > i64::MAX as u64 {
            return bad(format!("seed must be at most {}, got {}", i64::MAX, self.seed));
        }
        self.sim.validate()?;
        match self.experiment {
            ExperimentKind::LockingMap => {
                let l = &self.locking_map;
                if l.points < 3 || l.points % 2 == 0 {
                    return bad(format!("locking_map.points must be odd and >= 3, got {}", l.points));
                }
                if !(l.omega_max > 0.0 && l.kappa >= 0.0 && l.settle >= 0.0 && l.duration > 0.0) {
                    return bad("locking_map needs omega_max > 0, kappa >= 0, settle >= 0, duration > 0".into());
                }
                self.pipeline.detection.validate(self.record_interval())?;
            }
            ExperimentKind::BeatTraces => {
                let b = &self.beat_traces;
                if b.omegas.is_empty() || b.pulses == 0 {
                    return bad("beat_traces needs at least one detuning and one pulse".into());
                }
                if !(b.beta0 >= 0.0 && b.nzd_window.0 < b.nzd_window.1) {
                    return bad("beat_traces needs beta0 >= 0 and an increasing nzd_window".into());
                }
                self.pipeline.detection.validate(self.record_interval())?;
            }
            ExperimentKind::HistogramStability => {
                let h = &self.histogram_stability;
                if h.batches < 2 || h.batch_pulses < 100 {
                    return bad("histogram_stability needs >= 2 batches of >= 100 pulses".into());
                }
                self.pipeline.validate(&self.sim)?;
            }
            ExperimentKind::Autocorr => {
                if self.autocorr.pulses <= self.analysis.max_lag {
                    return bad("autocorr.pulses must exceed analysis.max_lag".into());
                }
                self.pipeline.validate(&self.sim)?;
            }
            ExperimentKind::Generate => {
                let g = &self.generate;
                if g.calibration_pulses == 0 || g.calibration_pulses >= g.pulses {
                    return bad("generate needs 0 < calibration_pulses < pulses".into());
                }
                if g.block_bits == 0 || !(g.epsilon > 0.0 && g.epsilon < 1.0) {
                    return bad("generate needs block_bits > 0 and epsilon in (0, 1)".into());
                }
                if !(g.min_entropy_floor >= 0.0) {
                    return bad("generate.min_entropy_floor must be >= 0".into());
                }
                self.pipeline.validate(&self.sim)?;
            }
        }
        if self.analysis.histogram_bins == 0 {
            return bad("analysis.histogram_bins must be >= 1".into());
        }
        Ok(())
    }

    pub fn record_interval(&self) -> f64 {
        self.sim.grid.dt * self.sim.grid.record_stride as f64
    }
}
