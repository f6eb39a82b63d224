use serde::{Deserialize, Serialize};

use super::trace::AnalogTrace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    Nearest,
    Linear,
}

/// Where inside each modulation cycle the single sample is taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingPolicy {
    /// Offset from the cycle start (ns).
    pub delay: f64,
    pub interpolation: Interpolation,
    /// Leading cycles dropped from the batch.
    pub warmup_cycles: usize,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        Self {
            delay: 11.0,
            interpolation: Interpolation::Linear,
            warmup_cycles: 0,
        }
    }
}

impl SamplingPolicy {
    pub fn validate(&self, t_mod: f64) -> Result<()> {
        if !(self.delay >= 0.0 && self.delay < t_mod) {
            return Err(Error::Config(format!(
                "sampling delay {} ns lies outside the {} ns cycle",
                self.delay, t_mod
            )));
        }
        Ok(())
    }
}

/// One value per analyzed cycle.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleBatch {
    /// Global cycle index of the first entry.
    pub first_cycle: u64,
    pub values: Vec<f64>,
    pub phases: Option<Vec<f64>>,
    pub codes: Option<Vec<u16>>,
}

impl SampleBatch {
    pub fn from_values(first_cycle: u64, values: Vec<f64>) -> Self {
        Self {
            first_cycle,
            values,
            phases: None,
            codes: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Checks that every optional column matches the value count.
    pub fn check(&self) -> Result<()> {
        let n = self.values.len();
        for (what, len) in [
            ("phases", self.phases.as_ref().map(Vec::len)),
            ("codes", self.codes.as_ref().map(Vec::len)),
        ] {
            if let Some(len) = len {
                if len != n {
                    return Err(Error::LengthMismatch {
                        what,
                        expected: n,
                        actual: len,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn extend(&mut self, other: SampleBatch) {
        fn merge<T>(a: &mut Option<Vec<T>>, b: Option<Vec<T>>, first: bool) {
            match (a.as_mut(), b) {
                (Some(x), Some(y)) => x.extend(y),
                (None, Some(y)) if first => *a = Some(y),
                _ => *a = None,
            }
        }
        let first = self.values.is_empty();
        if first {
            self.first_cycle = other.first_cycle;
        }
        merge(&mut self.phases, other.phases, first);
        merge(&mut self.codes, other.codes, first);
        self.values.extend(other.values);
    }
}

/// Trace value at time `t`, or `None` outside the covered span.
pub fn sample_at(trace: &AnalogTrace, t: f64, interpolation: Interpolation) -> Option<f64> {
    if trace.is_empty() {
        return None;
    }
    let pos = (t - trace.t0) / trace.interval;
    let last = (trace.len() - 1) as f64;
    let tol = 1e-9;
    if pos < -tol || pos > last + tol {
        return None;
    }
    let pos = pos.clamp(0.0, last);
    match interpolation {
        Interpolation::Nearest => Some(trace.values[pos.round() as usize]),
        Interpolation::Linear => {
            let i = pos.floor() as usize;
            let frac = pos - i as f64;
            if frac < tol || i + 1 >= trace.len() {
                Some(trace.values[i])
            } else {
                Some(trace.values[i] + (trace.values[i + 1] - trace.values[i]) * frac)
            }
        }
    }
}

/// Takes one value per cycle at `cycle_start + delay`, skipping the
/// policy's warm-up cycles.
pub fn sample_per_pulse(
    trace: &AnalogTrace,
    cycle_starts: &[f64],
    t_mod: f64,
    policy: &SamplingPolicy,
) -> Result<SampleBatch> {
    policy.validate(t_mod)?;
    let values = cycle_starts
        .iter()
        .skip(policy.warmup_cycles)
        .map(|&start| {
            let t = start + policy.delay;
            sample_at(trace, t, policy.interpolation).ok_or_else(|| {
                Error::InsufficientData(format!("trace does not cover sample time {t} ns"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleBatch::from_values(policy.warmup_cycles as u64, values))
}
