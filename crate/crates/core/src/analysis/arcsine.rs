use std::f64::consts::PI;

use serde::Serialize;

use super::ks::ks_one_sample;
use crate::error::{Error, Result};
use crate::numeric::{percentile_sorted, sorted_copy};

/// Robust range used to normalize samples before the arcsine test.
pub const ARCSINE_PERCENTILES: (f64, f64) = (0.5, 99.5);

/// F(x) = (2/π)·asin(√((x+1)/2)) on [−1, 1].
pub fn arcsine_cdf(x: f64) -> f64 {
    if x <= -1.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        2.0 / PI * ((x + 1.0) / 2.0).sqrt().asin()
    }
}

/// Arcsine quantile, the inverse of [`arcsine_cdf`].
fn arcsine_quantile(p: f64) -> f64 {
    -(PI * p).cos()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcsineFit {
    pub distance: f64,
    pub p_value: f64,
    /// Samples mapped affinely onto [−1, 1] and clamped there.
    pub normalized: Vec<f64>,
}

/// KS distance between affinely normalized samples and the arcsine law.
///
/// The 0.5 and 99.5 percentiles are mapped onto the arcsine quantiles of
/// the same levels (±cos(0.005π) ≈ ±0.99988), so outliers from amplifier
/// noise cannot stretch the scale and an exact arcsine input is left
/// unbiased.
pub fn arcsine_ks(samples: &[f64]) -> Result<ArcsineFit> {
    if samples.len() < 100 {
        return Err(Error::InsufficientData(format!(
            "arcsine test needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    let sorted = sorted_copy(samples);
    let (plo, phi) = ARCSINE_PERCENTILES;
    let lo = percentile_sorted(&sorted, plo);
    let hi = percentile_sorted(&sorted, phi);
    if !(hi > lo) {
        return Err(Error::Degenerate("arcsine test on (nearly) constant samples".into()));
    }
    let (qlo, qhi) = (arcsine_quantile(plo / 100.0), arcsine_quantile(phi / 100.0));
    let scale = (qhi - qlo) / (hi - lo);
    let normalized: Vec<f64> = samples
        .iter()
        .map(|&v| (qlo + (v - lo) * scale).clamp(-1.0, 1.0))
        .collect();
    let ks = ks_one_sample(&normalized, arcsine_cdf)?;
    Ok(ArcsineFit {
        distance: ks.distance,
        p_value: ks.p_value,
        normalized,
    })
}
