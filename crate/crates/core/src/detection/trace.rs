use num_complex::Complex64;

use super::chain::Port;
use crate::error::{Error, Result};
use crate::sim::Trajectory;

/// Uniformly sampled real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogTrace {
    /// Time of the first sample (ns).
    pub t0: f64,
    /// Sample interval (ns).
    pub interval: f64,
    pub values: Vec<f64>,
}

impl AnalogTrace {
    pub fn new(t0: f64, interval: f64, values: Vec<f64>) -> Result<Self> {
        if !(interval > 0.0 && interval.is_finite()) {
            return Err(Error::Config(format!("sample interval must be > 0, got {interval}")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Degenerate(format!("trace value {i} is not finite")));
        }
        Ok(Self {
            t0,
            interval,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.interval
    }

    pub fn end_time(&self) -> f64 {
        self.time(self.len().saturating_sub(1))
    }

    /// Sample rate in GSa/s.
    pub fn rate(&self) -> f64 {
        1.0 / self.interval
    }

    /// Nyquist frequency in GHz.
    pub fn nyquist(&self) -> f64 {
        0.5 / self.interval
    }

    pub fn with_values(&self, values: Vec<f64>) -> Self {
        Self {
            t0: self.t0,
            interval: self.interval,
            values,
        }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len().max(1) as f64
    }

    /// Subset covering `[t_start, t_end)`.
    pub fn window(&self, t_start: f64, t_end: f64) -> AnalogTrace {
        let first = ((t_start - self.t0) / self.interval).ceil().max(0.0) as usize;
        let last = (((t_end - self.t0) / self.interval).ceil().max(0.0) as usize).min(self.len());
        let first = first.min(last);
        AnalogTrace {
            t0: self.time(first),
            interval: self.interval,
            values: self.values[first..last].to_vec(),
        }
    }
}

/// Ideal 2×2 coupler with a 90° cross-port phase. Returns the intensities
/// of the two output ports; their sum equals the input power exactly.
#[inline]
pub fn mmi_combine(e1: Complex64, e2: Complex64) -> (f64, f64) {
    let i = Complex64::i();
    let plus = (e1 + i * e2).norm_sqr() / 2.0;
    let minus = (i * e1 + e2).norm_sqr() / 2.0;
    (plus, minus)
}

/// Two-beam interference intensity i_S + 2·i_P·cos(phase).
pub fn beat_intensity_model(i_cw: f64, i_gs: f64, accumulated_phase: f64) -> Result<f64> {
    if i_cw < 0.0 || i_gs < 0.0 {
        return Err(Error::Config(format!(
            "intensities must be non-negative, got {i_cw} and {i_gs}"
        )));
    }
    Ok(i_cw + i_gs + 2.0 * (i_cw * i_gs).sqrt() * accumulated_phase.cos())
}

/// Detected photocurrent for every trajectory record (responsivity 1).
pub fn trace_from_trajectory(traj: &Trajectory, port: Port) -> AnalogTrace {
    let values = traj
        .e1
        .iter()
        .zip(&traj.e2)
        .map(|(&a, &b)| port.detect(a, b))
        .collect();
    AnalogTrace {
        t0: traj.t0,
        interval: traj.record_interval(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mmi_examples() {
        assert_eq!(mmi_combine(c(1.0, 0.0), c(0.0, 0.0)), (0.5, 0.5));
        let (p, m) = mmi_combine(c(1.0, 0.0), c(0.0, 1.0));
        assert!(p.abs() < 1e-15 && (m - 2.0).abs() < 1e-15);
        let (p, m) = mmi_combine(c(1.0, 0.0), c(1.0, 0.0));
        assert!((p - 1.0).abs() < 1e-15 && (m - 1.0).abs() < 1e-15);
    }

    #[test]
    fn beat_model_examples() {
        assert_eq!(beat_intensity_model(1.0, 1.0, 0.0).unwrap(), 4.0);
        assert!(beat_intensity_model(1.0, 1.0, PI).unwrap().abs() < 1e-15);
        assert_eq!(beat_intensity_model(4.0, 1.0, 0.0).unwrap(), 9.0);
        assert!(beat_intensity_model(-1.0, 1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn mmi_conserves_power(a in -10.0..10.0f64, b in -10.0..10.0f64,
                               x in -10.0..10.0f64, y in -10.0..10.0f64) {
            let (e1, e2) = (c(a, b), c(x, y));
            let (p, m) = mmi_combine(e1, e2);
            let total = e1.norm_sqr() + e2.norm_sqr();
            prop_assert!((p + m - total).abs() <= 1e-12 * total.max(1.0));
        }
    }

    #[test]
    fn window_selects_range() {
        let tr = AnalogTrace::new(10.0, 0.5, (0..20).map(f64::from).collect()).unwrap();
        let w = tr.window(11.0, 12.5);
        assert_eq!(w.values, vec![2.0, 3.0, 4.0]);
        assert_eq!(w.t0, 11.0);
    }
}
