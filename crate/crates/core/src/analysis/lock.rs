use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::circular::{circular_stats, PhaseBatch};
use crate::detection::AnalogTrace;
use crate::error::{Error, Result};

/// Welch segment length for CW beat spectra.
const SEGMENT: usize = 1024;
/// Half-width of the neighbourhood whose median defines the local floor.
const FLOOR_HALF_WIDTH: usize = 16;
/// Low-frequency bins ignored by the peak search.
const DC_BINS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LockThresholds {
    /// Gain-switched mode: locked when the phase batch variance is below this.
    pub circular_variance: f64,
    /// CW mode: unlocked when a spectral line exceeds the local floor by this factor.
    pub spectral_peak_ratio: f64,
    pub min_cycles: usize,
}

impl Default for LockThresholds {
    fn default() -> Self {
        Self {
            circular_variance: 0.05,
            spectral_peak_ratio: 10.0,
            min_cycles: 50,
        }
    }
}

pub enum LockInput<'a> {
    Phases(&'a PhaseBatch),
    CwTrace(&'a AnalogTrace),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LockResult {
    pub locked: bool,
    /// Circular variance, or the strongest peak-to-floor ratio.
    pub metric: f64,
    /// Frequency of the strongest spectral line (GHz), CW mode only.
    pub peak_frequency: Option<f64>,
}

/// One-sided Welch periodogram (Hann window, 50 % overlap) of the
/// mean-removed signal; arbitrary overall scale.
pub fn welch_psd(values: &[f64], segment: usize) -> Result<Vec<f64>> {
    if segment < 8 || values.len() < segment {
        return Err(Error::InsufficientData(format!(
            "Welch estimate needs {segment} samples per segment, have {}",
            values.len()
        )));
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let window: Vec<f64> = (0..segment)
        .map(|i| 0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / segment as f64).cos())
        .collect();
    let fft = FftPlanner::new().plan_fft_forward(segment);
    let mut psd = vec![0.0; segment / 2 + 1];
    let mut buf = vec![Complex64::new(0.0, 0.0); segment];
    let step = segment / 2;
    let mut count = 0;
    let mut start = 0;
    while start + segment <= values.len() {
        for (b, (&v, &w)) in buf.iter_mut().zip(values[start..].iter().zip(&window)) {
            *b = Complex64::new((v - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (p, b) in psd.iter_mut().zip(&buf) {
            *p += b.norm_sqr();
        }
        count += 1;
        start += step;
    }
    psd.iter_mut().for_each(|p| *p /= count as f64);
    Ok(psd)
}

/// Largest ratio of a PSD bin to the median of its neighbours.
fn peak_to_floor(psd: &[f64]) -> (f64, usize) {
    let mut best = (0.0, DC_BINS);
    let mut neigh = Vec::with_capacity(2 * FLOOR_HALF_WIDTH);
    for k in DC_BINS..psd.len() {
        neigh.clear();
        let lo = k.saturating_sub(FLOOR_HALF_WIDTH).max(DC_BINS);
        let hi = (k + FLOOR_HALF_WIDTH).min(psd.len() - 1);
        neigh.extend((lo..=hi).filter(|&j| j != k).map(|j| psd[j]));
        if neigh.is_empty() {
            continue;
        }
        neigh.sort_by(f64::total_cmp);
        let median = neigh[neigh.len() / 2];
        let ratio = if median > 0.0 {
            psd[k] / median
        } else if psd[k] > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio > best.0 {
            best = (ratio, k);
        }
    }
    best
}

pub fn lock_classify(input: LockInput<'_>, thresholds: &LockThresholds) -> Result<LockResult> {
    match input {
        LockInput::Phases(batch) => {
            if batch.len() < thresholds.min_cycles {
                return Err(Error::InsufficientData(format!(
                    "lock classification needs {} cycles, got {}",
                    thresholds.min_cycles,
                    batch.len()
                )));
            }
            let cv = circular_stats(batch)?.variance;
            Ok(LockResult {
                locked: cv < thresholds.circular_variance,
                metric: cv,
                peak_frequency: None,
            })
        }
        LockInput::CwTrace(trace) => {
            let segment = SEGMENT.min(trace.len() / 2);
            if segment < 4 * FLOOR_HALF_WIDTH {
                return Err(Error::InsufficientData(format!(
                    "CW trace of {} samples is too short for a beat spectrum",
                    trace.len()
                )));
            }
            let psd = welch_psd(&trace.values, segment)?;
            let (ratio, bin) = peak_to_floor(&psd);
            Ok(LockResult {
                locked: ratio < thresholds.spectral_peak_ratio,
                metric: ratio,
                peak_frequency: Some(bin as f64 / (segment as f64 * trace.interval)),
            })
        }
    }
}

/// Mean rate of change of arg(e2·e1*) over the record, in GHz.
pub fn beat_frequency_from_fields(e1: &[Complex64], e2: &[Complex64], interval: f64) -> Result<f64> {
    if e1.len() != e2.len() {
        return Err(Error::LengthMismatch {
            what: "field records",
            expected: e1.len(),
            actual: e2.len(),
        });
    }
    if e1.len() < 2 {
        return Err(Error::InsufficientData("beat frequency needs two records".into()));
    }
    let mut total = 0.0;
    let mut prev = (e2[0] * e1[0].conj()).arg();
    for (a, b) in e1.iter().zip(e2).skip(1) {
        let cur = (b * a.conj()).arg();
        let mut d = cur - prev;
        d -= std::f64::consts::TAU * (d / std::f64::consts::TAU).round();
        total += d;
        prev = cur;
    }
    Ok(total / ((e1.len() - 1) as f64 * interval) / std::f64::consts::TAU)
}
