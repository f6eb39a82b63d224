use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::arcsine::arcsine_ks;
use super::autocorr::{autocorrelation, NoiseSubtracted};
use super::circular::{circular_stats, PhaseBatch};
use super::entropy::{code_histogram, min_entropy, Histogram};
use super::normality::{dagostino_pearson, NormalityTest};
use crate::error::{Error, Result};

/// Lags whose correlation coefficients enter the normality test by default.
pub const DEFAULT_NORMALITY_LAGS: (usize, usize) = (2, 500);

/// Summary statistics of one sample batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub n: usize,
    pub histogram: Histogram,
    /// Autocovariance Γ(k) (noise-subtracted when an off-pulse reference was used).
    pub gamma: Vec<f64>,
    pub rho: Vec<f64>,
    pub noise_floor: f64,
    pub noise_subtracted: bool,
    pub normality_lags: (usize, usize),
    pub normality: Option<NormalityTest>,
    pub arcsine_distance: Option<f64>,
    pub circular_variance: Option<f64>,
    pub bits: Option<u32>,
    pub min_entropy: Option<f64>,
}

impl StatsReport {
    /// Histogram, plain autocorrelation up to `max_lag`, arcsine distance
    /// and the normality test on ρ over `normality_lags`.
    pub fn from_samples(
        samples: &[f64],
        max_lag: usize,
        bins: usize,
        normality_lags: (usize, usize),
    ) -> Result<Self> {
        let ac = autocorrelation(samples, max_lag)?;
        let mut report = Self {
            n: samples.len(),
            histogram: Histogram::from_values(samples, bins)?,
            gamma: ac.gamma,
            rho: ac.rho,
            noise_floor: ac.noise_floor,
            noise_subtracted: false,
            normality_lags,
            normality: None,
            arcsine_distance: arcsine_ks(samples).ok().map(|f| f.distance),
            circular_variance: None,
            bits: None,
            min_entropy: None,
        };
        report.normality = report.normality_on_rho()?;
        Ok(report)
    }

    fn normality_on_rho(&self) -> Result<Option<NormalityTest>> {
        let (lo, hi) = self.normality_lags;
        let hi = hi.min(self.rho.len().saturating_sub(1));
        if hi < lo || hi + 1 - lo < 20 {
            return Ok(None);
        }
        dagostino_pearson(&self.rho[lo..=hi]).map(Some)
    }

    /// Replaces the correlation section with a noise-subtracted estimate.
    pub fn with_noise_subtracted(mut self, ns: &NoiseSubtracted) -> Result<Self> {
        let rho = ns.rho.clone().ok_or_else(|| {
            Error::Degenerate("noise subtraction removed all in-pulse variance".into())
        })?;
        self.gamma = ns.gamma.clone();
        self.rho = rho;
        self.noise_floor = ns.noise_floor;
        self.noise_subtracted = true;
        self.normality = self.normality_on_rho()?;
        Ok(self)
    }

    pub fn with_codes(mut self, codes: &[u16], bits: u32) -> Result<Self> {
        self.min_entropy = Some(min_entropy(&code_histogram(codes, bits), bits)?);
        self.bits = Some(bits);
        Ok(self)
    }

    pub fn with_phases(mut self, phases: &PhaseBatch) -> Result<Self> {
        self.circular_variance = Some(circular_stats(phases)?.variance);
        Ok(self)
    }

    /// `key = value` summary.
    pub fn write_text(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x}"));
        writeln!(w, "samples = {}", self.n)?;
        writeln!(w, "noise_floor = {}", self.noise_floor)?;
        writeln!(w, "noise_subtracted = {}", self.noise_subtracted)?;
        writeln!(w, "max_lag = {}", self.rho.len().saturating_sub(1))?;
        writeln!(w, "rho_1 = {}", opt(self.rho.get(1).copied()))?;
        let max_rest = self.rho.iter().skip(2).fold(None, |m: Option<f64>, r| {
            Some(m.map_or(r.abs(), |m| m.max(r.abs())))
        });
        writeln!(w, "max_abs_rho_k_ge_2 = {}", opt(max_rest))?;
        writeln!(
            w,
            "normality_lags = {}..{}",
            self.normality_lags.0, self.normality_lags.1
        )?;
        writeln!(w, "normality_k2 = {}", opt(self.normality.map(|t| t.statistic)))?;
        writeln!(w, "normality_p = {}", opt(self.normality.map(|t| t.p_value)))?;
        writeln!(w, "arcsine_ks_distance = {}", opt(self.arcsine_distance))?;
        writeln!(w, "circular_variance = {}", opt(self.circular_variance))?;
        writeln!(w, "bits = {}", self.bits.map_or("n/a".into(), |b| b.to_string()))?;
        writeln!(w, "min_entropy_bits_per_sample = {}", opt(self.min_entropy))?;
        w.flush()?;
        Ok(())
    }

    /// `bin_low_au,bin_high_au,count` rows.
    pub fn write_histogram_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "bin_low_au,bin_high_au,count")?;
        for (i, c) in self.histogram.counts.iter().enumerate() {
            writeln!(w, "{},{},{}", self.histogram.edges[i], self.histogram.edges[i + 1], c)?;
        }
        w.flush()?;
        Ok(())
    }

    /// `lag_pulses,gamma_au2,rho` rows.
    pub fn write_autocorr_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "lag_pulses,gamma_au2,rho")?;
        for (k, (g, r)) in self.gamma.iter().zip(&self.rho).enumerate() {
            writeln!(w, "{k},{g},{r}")?;
        }
        w.flush()?;
        Ok(())
    }
}
