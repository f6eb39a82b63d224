use serde::{Deserialize, Serialize};

use super::trace::AnalogTrace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterKind {
    Lowpass,
    Highpass,
}

/// Cascade of `order` identical first-order sections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    pub kind: FilterKind,
    /// -3 dB frequency of one section (GHz).
    pub cutoff: f64,
    pub order: u32,
}

impl FilterSpec {
    pub fn lowpass(cutoff: f64, order: u32) -> Self {
        Self {
            kind: FilterKind::Lowpass,
            cutoff,
            order,
        }
    }

    pub fn highpass(cutoff: f64, order: u32) -> Self {
        Self {
            kind: FilterKind::Highpass,
            cutoff,
            order,
        }
    }

    pub fn validate(&self, interval: f64) -> Result<()> {
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(Error::Config(format!("filter cutoff must be > 0, got {}", self.cutoff)));
        }
        if self.order < 1 {
            return Err(Error::Config("filter order must be >= 1".into()));
        }
        let nyquist = 0.5 / interval;
        if self.cutoff >= nyquist {
            return Err(Error::Config(format!(
                "filter cutoff {} GHz is not below the trace Nyquist frequency {} GHz",
                self.cutoff, nyquist
            )));
        }
        Ok(())
    }
}

/// Bilinear (pre-warped) discretization of 1/(1+s/ω_c) or s/(s+ω_c).
#[derive(Debug, Clone, Copy)]
struct Section {
    b0: f64,
    b1: f64,
    a1: f64,
    kind: FilterKind,
    x_prev: f64,
    y_prev: f64,
}

impl Section {
    fn new(spec: &FilterSpec, interval: f64) -> Self {
        let k = (std::f64::consts::PI * spec.cutoff * interval).tan();
        let norm = 1.0 / (1.0 + k);
        let (b0, b1) = match spec.kind {
            FilterKind::Lowpass => (k * norm, k * norm),
            FilterKind::Highpass => (norm, -norm),
        };
        Self {
            b0,
            b1,
            a1: (k - 1.0) * norm,
            kind: spec.kind,
            x_prev: 0.0,
            y_prev: 0.0,
        }
    }

    /// Steady state for a constant input `x0`.
    fn prime(&mut self, x0: f64) -> f64 {
        self.x_prev = x0;
        self.y_prev = match self.kind {
            FilterKind::Lowpass => x0,
            FilterKind::Highpass => 0.0,
        };
        self.y_prev
    }

    #[inline]
    fn step(&mut self, x: f64) -> f64 {
        let y = self.b0 * x + self.b1 * self.x_prev - self.a1 * self.y_prev;
        self.x_prev = x;
        self.y_prev = y;
        y
    }
}

/// Stateful filter cascade for streaming use. The first sample primes every
/// section at its steady state, so a constant input passes without a
/// start-up transient.
#[derive(Debug, Clone)]
pub struct FilterCascade {
    sections: Vec<Section>,
    primed: bool,
}

impl FilterCascade {
    pub fn new(spec: &FilterSpec, interval: f64) -> Result<Self> {
        spec.validate(interval)?;
        Ok(Self {
            sections: vec![Section::new(spec, interval); spec.order as usize],
            primed: false,
        })
    }

    pub fn process_in_place(&mut self, values: &mut [f64]) {
        let Some(&first) = values.first() else {
            return;
        };
        if !self.primed {
            let mut x = first;
            for s in &mut self.sections {
                x = s.prime(x);
            }
            self.primed = true;
        }
        for v in values.iter_mut() {
            let mut x = *v;
            for s in &mut self.sections {
                x = s.step(x);
            }
            *v = x;
        }
    }
}

/// Filters a whole trace from a freshly primed state.
pub fn apply_filter(trace: &AnalogTrace, spec: &FilterSpec) -> Result<AnalogTrace> {
    let mut cascade = FilterCascade::new(spec, trace.interval)?;
    let mut values = trace.values.clone();
    cascade.process_in_place(&mut values);
    Ok(trace.with_values(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::TAU;

    fn sine(freq: f64, interval: f64, n: usize) -> AnalogTrace {
        let v = (0..n).map(|i| (TAU * freq * i as f64 * interval).sin()).collect();
        AnalogTrace::new(0.0, interval, v).unwrap()
    }

    fn tail_amplitude(tr: &AnalogTrace) -> f64 {
        let n = tr.len();
        tr.values[n / 2..].iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    #[test]
    fn lowpass_passes_dc() {
        let tr = AnalogTrace::new(0.0, 0.01, vec![3.25; 5000]).unwrap();
        let out = apply_filter(&tr, &FilterSpec::lowpass(20.0, 4)).unwrap();
        assert!(out.values.iter().all(|v| (v - 3.25).abs() < 1e-6));
    }

    #[test]
    fn highpass_blocks_dc() {
        let tr = AnalogTrace::new(0.0, 0.01, vec![3.25; 20_000]).unwrap();
        let spec = FilterSpec::highpass(0.03, 1);
        let out = apply_filter(&tr, &spec).unwrap();
        let time_const = 1.0 / (TAU * spec.cutoff);
        let idx = (10.0 * time_const / tr.interval) as usize;
        assert!(out.values[idx..].iter().all(|v| v.abs() < 1e-3));
    }

    #[test]
    fn highpass_settles_after_step() {
        // zero then a step: the output must decay below 1e-3 within 10 τ
        let mut v = vec![0.0; 100];
        v.extend(vec![1.0; 40_000]);
        let tr = AnalogTrace::new(0.0, 0.01, v).unwrap();
        let spec = FilterSpec::highpass(0.03, 1);
        let out = apply_filter(&tr, &spec).unwrap();
        let tc = 1.0 / (TAU * spec.cutoff);
        let idx = 100 + (10.0 * tc / tr.interval) as usize;
        assert!(out.values[100] > 0.9);
        assert!(out.values[idx..].iter().all(|v| v.abs() < 1e-3));
    }

    #[test]
    fn single_pole_is_3db_at_cutoff() {
        for (fc, interval) in [(20.0, 0.005), (40.0, 0.01), (1.0, 0.01)] {
            let n = (40.0 / (fc * interval)) as usize;
            let out = apply_filter(&sine(fc, interval, n), &FilterSpec::lowpass(fc, 1)).unwrap();
            let a = tail_amplitude(&out);
            assert!((a / std::f64::consts::FRAC_1_SQRT_2 - 1.0).abs() < 0.02, "fc {fc}: {a}");
        }
        let out = apply_filter(&sine(1.0, 0.01, 8000), &FilterSpec::highpass(1.0, 1)).unwrap();
        let a = tail_amplitude(&out);
        assert!((a / std::f64::consts::FRAC_1_SQRT_2 - 1.0).abs() < 0.02);
    }

    #[test]
    fn filter_is_linear() {
        let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(3);
        for spec in [FilterSpec::lowpass(20.0, 4), FilterSpec::highpass(0.03, 2)] {
            let x: Vec<f64> = (0..3000).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..3000).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (a, b) = (1.7, -0.4);
            let mix: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
            let f = |v: Vec<f64>| apply_filter(&AnalogTrace::new(0.0, 0.01, v).unwrap(), &spec).unwrap();
            let (fx, fy, fm) = (f(x), f(y), f(mix));
            for i in 0..3000 {
                let want = a * fx.values[i] + b * fy.values[i];
                assert!((fm.values[i] - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cutoff_above_nyquist_rejected() {
        let tr = AnalogTrace::new(0.0, 0.02, vec![0.0; 10]).unwrap();
        assert!(matches!(
            apply_filter(&tr, &FilterSpec::lowpass(25.0, 1)),
            Err(Error::Config(_))
        ));
        assert!(apply_filter(&tr, &FilterSpec::lowpass(24.9, 1)).is_ok());
    }

    #[test]
    fn streaming_matches_whole_trace() {
        let tr = sine(3.0, 0.01, 4000);
        let spec = FilterSpec::lowpass(20.0, 4);
        let whole = apply_filter(&tr, &spec).unwrap();
        let mut cascade = FilterCascade::new(&spec, 0.01).unwrap();
        let mut parts = tr.values.clone();
        for chunk in parts.chunks_mut(333) {
            cascade.process_in_place(chunk);
        }
        assert_eq!(parts, whole.values);
    }
}
