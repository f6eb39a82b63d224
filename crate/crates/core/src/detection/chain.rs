use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::amplifier::AmplifierSpec;
use super::digitizer::DigitizerSpec;
use super::filter::{FilterCascade, FilterSpec};
use super::trace::{mmi_combine, AnalogTrace};
use crate::error::Result;

/// Which MMI output is detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Port {
    #[default]
    Plus,
    Minus,
    /// `i_plus − i_minus`: the common-mode intensity cancels, leaving the beat.
    Balanced,
}

impl Port {
    #[inline]
    pub fn detect(self, e1: Complex64, e2: Complex64) -> f64 {
        let (plus, minus) = mmi_combine(e1, e2);
        match self {
            Port::Plus => plus,
            Port::Minus => minus,
            Port::Balanced => plus - minus,
        }
    }
}

/// Photodiode → RF amplifier → scope front end → digital high-pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionConfig {
    pub port: Port,
    pub photodiode: FilterSpec,
    pub amplifier: AmplifierSpec,
    pub scope: FilterSpec,
    pub highpass: Option<FilterSpec>,
    pub digitizer: DigitizerSpec,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            port: Port::Plus,
            photodiode: FilterSpec::lowpass(40.0, 2),
            amplifier: AmplifierSpec::default(),
            scope: FilterSpec::lowpass(20.0, 4),
            highpass: Some(FilterSpec::highpass(0.03, 1)),
            digitizer: DigitizerSpec::default(),
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self, interval: f64) -> Result<()> {
        self.photodiode.validate(interval)?;
        self.scope.validate(interval)?;
        if let Some(hp) = &self.highpass {
            hp.validate(interval)?;
        }
        self.amplifier.validate()?;
        self.digitizer.validate()
    }
}

/// Streaming detection chain. Filter state carries over between calls, so a
/// long record can be fed in consecutive blocks with the same result as one
/// pass (given the same noise draws).
#[derive(Debug, Clone)]
pub struct DetectionChain {
    config: DetectionConfig,
    interval: f64,
    photodiode: FilterCascade,
    scope: FilterCascade,
    highpass: Option<FilterCascade>,
}

impl DetectionChain {
    pub fn new(config: &DetectionConfig, interval: f64) -> Result<Self> {
        config.validate(interval)?;
        Ok(Self {
            config: config.clone(),
            interval,
            photodiode: FilterCascade::new(&config.photodiode, interval)?,
            scope: FilterCascade::new(&config.scope, interval)?,
            highpass: config
                .highpass
                .as_ref()
                .map(|hp| FilterCascade::new(hp, interval))
                .transpose()?,
        })
    }

    pub fn config(&self) -> &DetectionConfig {
        &self.config
    }

    pub fn interval(&self) -> f64 {
        self.interval
    }

    /// Photocurrent samples for a block of field records.
    pub fn photocurrent(&self, e1: &[Complex64], e2: &[Complex64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(e1.iter().zip(e2).map(|(&a, &b)| self.config.port.detect(a, b)));
    }

    /// Runs a block of photocurrent samples through the chain in place.
    pub fn process<R: Rng + ?Sized>(&mut self, values: &mut [f64], rng: &mut R) {
        self.photodiode.process_in_place(values);
        self.config.amplifier.apply_in_place(values, rng);
        self.scope.process_in_place(values);
        if let Some(hp) = &mut self.highpass {
            hp.process_in_place(values);
        }
    }

    pub fn process_trace<R: Rng + ?Sized>(&mut self, trace: &AnalogTrace, rng: &mut R) -> AnalogTrace {
        let mut values = trace.values.clone();
        self.process(&mut values, rng);
        trace.with_values(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn balanced_port_is_pure_beat() {
        let e1 = Complex64::new(2.0, 0.0);
        for k in 0..16 {
            let phi = k as f64 * 0.4;
            let e2 = Complex64::from_polar(1.5, phi);
            let plus = Port::Plus.detect(e1, e2);
            let bal = Port::Balanced.detect(e1, e2);
            // i_plus = (I1+I2)/2 + Im(e1 e2*)
            let want = 0.5 * (4.0 + 2.25) + (e1 * e2.conj()).im;
            assert!((plus - want).abs() < 1e-12);
            assert!((bal - 2.0 * (e1 * e2.conj()).im).abs() < 1e-12);
        }
    }

    #[test]
    fn block_processing_matches_single_pass() {
        let cfg = DetectionConfig::default();
        let values: Vec<f64> = (0..5000).map(|i| (i as f64 * 0.13).sin() + 3.0).collect();
        let mut whole = values.clone();
        DetectionChain::new(&cfg, 0.01)
            .unwrap()
            .process(&mut whole, &mut Xoshiro256PlusPlus::seed_from_u64(4));
        let mut chain = DetectionChain::new(&cfg, 0.01).unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(4);
        let mut blocks = values;
        for b in blocks.chunks_mut(700) {
            chain.process(b, &mut rng);
        }
        assert_eq!(blocks, whole);
    }

    #[test]
    fn rejects_filters_beyond_nyquist() {
        let cfg = DetectionConfig::default();
        assert!(DetectionChain::new(&cfg, 0.02).is_err());
        assert!(DetectionChain::new(&cfg, 0.01).is_ok());
    }
}
