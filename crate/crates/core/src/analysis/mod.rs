//! Statistics for validating per-pulse samples.

mod arcsine;
mod autocorr;
mod circular;
mod entropy;
mod ks;
mod lock;
mod normality;
mod phase;
mod report;

pub use arcsine::{arcsine_cdf, arcsine_ks, ArcsineFit, ARCSINE_PERCENTILES};
pub use autocorr::{autocorrelation, noise_subtracted_autocorrelation, Autocorrelation, NoiseSubtracted};
pub use circular::{circular_stats, CircularStats, PhaseBatch};
pub use entropy::{arcsine_min_entropy, code_histogram, min_entropy, Histogram};
pub use ks::{kolmogorov_q, ks_one_sample, ks_two_sample, KsResult};
pub use lock::{beat_frequency_from_fields, lock_classify, welch_psd, LockInput, LockResult, LockThresholds};
pub use normality::{dagostino_pearson, NormalityTest};
pub use phase::{extract_pulse_phase, PhaseFit};
pub use report::{StatsReport, DEFAULT_NORMALITY_LAGS};
