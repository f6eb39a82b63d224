use serde::{Deserialize, Serialize};

use super::trace::AnalogTrace;
use crate::error::{Error, Result};
use crate::numeric::{percentile_sorted, sorted_copy};

/// Percentiles used when the full scale is calibrated from data.
pub const CALIBRATION_PERCENTILES: (f64, f64) = (0.1, 99.9);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DigitizerSpec {
    /// Sample rate (GSa/s).
    pub rate: f64,
    pub bits: u32,
    /// `[v_min, v_max]`; calibrated from data when absent.
    pub full_scale: Option<[f64; 2]>,
}

impl Default for DigitizerSpec {
    fn default() -> Self {
        Self {
            rate: 50.0,
            bits: 8,
            full_scale: None,
        }
    }
}

impl DigitizerSpec {
    pub fn interval(&self) -> f64 {
        1.0 / self.rate
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return Err(Error::Config(format!("digitizer rate must be > 0, got {}", self.rate)));
        }
        if !(1..=16).contains(&self.bits) {
            return Err(Error::Config(format!("digitizer bits must be in 1..=16, got {}", self.bits)));
        }
        if let Some([lo, hi]) = self.full_scale {
            if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                return Err(Error::Config(format!("full scale needs v_min < v_max, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// Quantizer for this spec; `calibration` supplies the data used when
    /// no explicit full scale is configured.
    pub fn quantizer(&self, calibration: &[f64]) -> Result<Quantizer> {
        self.validate()?;
        match self.full_scale {
            Some([lo, hi]) => Quantizer::new(lo, hi, self.bits),
            None => Quantizer::calibrate(calibration, self.bits),
        }
    }
}

/// Uniform mid-rise quantizer over `[v_min, v_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantizer {
    pub v_min: f64,
    pub v_max: f64,
    pub bits: u32,
}

impl Quantizer {
    pub fn new(v_min: f64, v_max: f64, bits: u32) -> Result<Self> {
        if !(v_min < v_max && v_min.is_finite() && v_max.is_finite()) {
            return Err(Error::Config(format!("quantizer needs v_min < v_max, got [{v_min}, {v_max}]")));
        }
        if !(1..=16).contains(&bits) {
            return Err(Error::Config(format!("quantizer bits must be in 1..=16, got {bits}")));
        }
        Ok(Self { v_min, v_max, bits })
    }

    /// Full scale from the 0.1 / 99.9 percentiles of `values`.
    pub fn calibrate(values: &[f64], bits: u32) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData("no calibration samples for the digitizer".into()));
        }
        let sorted = sorted_copy(values);
        let (plo, phi) = CALIBRATION_PERCENTILES;
        let lo = percentile_sorted(&sorted, plo);
        let hi = percentile_sorted(&sorted, phi);
        if !(hi > lo) {
            return Err(Error::Degenerate("calibration samples span a zero range".into()));
        }
        Self::new(lo, hi, bits)
    }

    pub fn levels(&self) -> u32 {
        1 << self.bits
    }

    #[inline]
    pub fn code(&self, v: f64) -> u16 {
        let levels = self.levels() as f64;
        let x = ((v - self.v_min) / (self.v_max - self.v_min) * levels).floor();
        x.clamp(0.0, levels - 1.0) as u16
    }

    /// Centre voltage of a code's bin.
    pub fn level(&self, code: u16) -> f64 {
        self.v_min + (code as f64 + 0.5) * (self.v_max - self.v_min) / self.levels() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DigitizedTrace {
    pub t0: f64,
    pub interval: f64,
    pub codes: Vec<u16>,
    pub quantizer: Quantizer,
    /// Samples below `v_min` / above `v_max`.
    pub clipped_low: usize,
    pub clipped_high: usize,
}

/// Linear-interpolation resampling onto a grid of `rate` GSa/s starting at
/// the trace start.
pub fn resample(trace: &AnalogTrace, rate: f64) -> Result<AnalogTrace> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::Config(format!("resample rate must be > 0, got {rate}")));
    }
    let interval = 1.0 / rate;
    if trace.is_empty() {
        return AnalogTrace::new(trace.t0, interval, Vec::new());
    }
    let span = (trace.len() - 1) as f64 * trace.interval;
    let n_out = (span / interval + 1e-9).floor() as usize + 1;
    let last = trace.len() - 1;
    let values = (0..n_out)
        .map(|j| {
            let pos = j as f64 * interval / trace.interval;
            let i = (pos.floor() as usize).min(last);
            let frac = pos - i as f64;
            if i == last || frac <= 1e-12 {
                trace.values[i]
            } else {
                trace.values[i] + (trace.values[i + 1] - trace.values[i]) * frac
            }
        })
        .collect();
    AnalogTrace::new(trace.t0, interval, values)
}

/// Resamples to the digitizer rate and quantizes; clipping is counted.
pub fn digitize(trace: &AnalogTrace, spec: &DigitizerSpec) -> Result<DigitizedTrace> {
    spec.validate()?;
    let resampled = resample(trace, spec.rate)?;
    let quantizer = spec.quantizer(&resampled.values)?;
    let mut clipped_low = 0;
    let mut clipped_high = 0;
    let codes = resampled
        .values
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
    Ok(DigitizedTrace {
        t0: resampled.t0,
        interval: resampled.interval,
        codes,
        quantizer,
        clipped_low,
        clipped_high,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q8() -> Quantizer {
        Quantizer::new(-1.0, 1.0, 8).unwrap()
    }

    #[test]
    fn endpoints_and_midpoint() {
        let q = q8();
        assert_eq!(q.code(-1.0), 0);
        assert_eq!(q.code(1.0), 255);
        assert_eq!(q.code(0.0), 128);
        assert_eq!(q.code(-7.0), 0);
        assert_eq!(q.code(7.0), 255);
    }

    #[test]
    fn ramp_hits_every_code() {
        let n = 10_000;
        let v: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
        let tr = AnalogTrace::new(0.0, 0.02, v).unwrap();
        let spec = DigitizerSpec {
            rate: 50.0,
            bits: 8,
            full_scale: Some([-1.0, 1.0]),
        };
        let d = digitize(&tr, &spec).unwrap();
        let mut seen = [false; 256];
        for &c in &d.codes {
            seen[c as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(d.clipped_low + d.clipped_high, 0);
    }

    #[test]
    fn clipping_counted() {
        let tr = AnalogTrace::new(0.0, 0.02, vec![-2.0, 0.0, 0.5, 3.0, 4.0]).unwrap();
        let spec = DigitizerSpec {
            rate: 50.0,
            bits: 4,
            full_scale: Some([-1.0, 1.0]),
        };
        let d = digitize(&tr, &spec).unwrap();
        assert_eq!((d.clipped_low, d.clipped_high), (1, 2));
        assert_eq!(d.codes, vec![0, 8, 12, 15, 15]);
    }

    #[test]
    fn fifty_gsps_gives_twenty_ps() {
        let tr = AnalogTrace::new(0.0, 0.01, (0..1001).map(|i| (i as f64 * 0.1).sin()).collect()).unwrap();
        let d = digitize(&tr, &DigitizerSpec::default()).unwrap();
        assert_eq!(d.interval, 0.02);
        assert_eq!(d.codes.len(), 501);
    }

    #[test]
    fn resample_interpolates_linearly() {
        let tr = AnalogTrace::new(0.0, 0.01, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let r = resample(&tr, 200.0).unwrap();
        assert_eq!(r.len(), 7);
        for (j, v) in r.values.iter().enumerate() {
            assert!((v - 0.5 * j as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(Quantizer::new(1.0, 1.0, 8).is_err());
        assert!(Quantizer::new(0.0, 1.0, 17).is_err());
        assert!(Quantizer::new(0.0, 1.0, 0).is_err());
        assert!(Quantizer::calibrate(&[2.0; 10], 8).is_err());
    }

    #[test]
    fn calibration_spans_central_mass() {
        let v: Vec<f64> = (0..=1000).map(f64::from).collect();
        let q = Quantizer::calibrate(&v, 8).unwrap();
        assert!((q.v_min - 1.0).abs() < 1e-9);
        assert!((q.v_max - 999.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn quantizer_monotone(a in -3.0..3.0f64, b in -3.0..3.0f64, bits in 1u32..=16) {
            let q = Quantizer::new(-1.0, 1.0, bits).unwrap();
            let (v, w) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(q.code(v) <= q.code(w));
            prop_assert!((q.code(w) as u32) < q.levels());
        }
    }
}
