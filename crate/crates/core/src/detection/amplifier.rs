use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::trace::AnalogTrace;
use crate::error::{Error, Result};

/// RF amplifier: voltage gain in dB plus additive white Gaussian noise
/// referred to the output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmplifierSpec {
    pub gain_db: f64,
    pub noise_sigma: f64,
}

impl Default for AmplifierSpec {
    fn default() -> Self {
        Self {
            gain_db: 30.0,
            noise_sigma: 2.0,
        }
    }
}

impl AmplifierSpec {
    pub fn linear_gain(&self) -> f64 {
        10f64.powf(self.gain_db / 20.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::Config(format!(
                "amplifier noise_sigma must be >= 0, got {}",
                self.noise_sigma
            )));
        }
        if !self.gain_db.is_finite() {
            return Err(Error::Config("amplifier gain must be finite".into()));
        }
        Ok(())
    }

    /// Applies gain and noise in place.
    pub fn apply_in_place<R: Rng + ?Sized>(&self, values: &mut [f64], rng: &mut R) {
        let g = self.linear_gain();
        if self.noise_sigma > 0.0 {
            for v in values.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *v = *v * g + self.noise_sigma * z;
            }
        } else {
            for v in values.iter_mut() {
                *v *= g;
            }
        }
    }
}

pub fn amplify<R: Rng + ?Sized>(trace: &AnalogTrace, spec: &AmplifierSpec, rng: &mut R) -> AnalogTrace {
    let mut values = trace.values.clone();
    spec.apply_in_place(&mut values, rng);
    trace.with_values(values)
}
