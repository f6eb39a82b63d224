use serde::Serialize;

use super::arcsine::arcsine_cdf;
use crate::error::{Error, Result};

/// H∞ = −log₂(max_i p_i) of a code histogram.
pub fn min_entropy(counts: &[u64], bits: u32) -> Result<f64> {
    if counts.len() as u64 > 1u64 << bits {
        return Err(Error::Config(format!(
            "{} histogram bins exceed the {bits}-bit code space",
            counts.len()
        )));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::InsufficientData("min-entropy of an empty histogram".into()));
    }
    let max = *counts.iter().max().expect("non-empty");
    Ok((-(max as f64 / total as f64).log2()).max(0.0))
}

/// Counts per code value.
pub fn code_histogram(codes: &[u16], bits: u32) -> Vec<u64> {
    let mut counts = vec![0u64; 1 << bits];
    for &c in codes {
        counts[c as usize] += 1;
    }
    counts
}

/// Min-entropy of an ideal arcsine variable quantized uniformly over
/// [−1, 1]: the two edge bins are the most probable.
pub fn arcsine_min_entropy(bits: u32) -> f64 {
    let width = 2.0 / (1u64 << bits) as f64;
    -arcsine_cdf(-1.0 + width).log2()
}

/// Equal-width histogram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// `bins` equal bins spanning the data range.
    pub fn from_values(values: &[f64], bins: usize) -> Result<Self> {
        if values.is_empty() || bins == 0 {
            return Err(Error::InsufficientData("histogram of no data".into()));
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        Self::with_range(values, bins, lo, hi)
    }

    /// Values outside `[lo, hi]` are folded into the end bins.
    pub fn with_range(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if !(hi > lo) || bins == 0 {
            return Err(Error::Config(format!("invalid histogram range [{lo}, {hi}] with {bins} bins")));
        }
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| lo + i as f64 * width).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            let b = ((v - lo) / width).floor().clamp(0.0, (bins - 1) as f64) as usize;
            counts[b] += 1;
        }
        Ok(Self { edges, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_and_point_mass() {
        assert_eq!(min_entropy(&[7; 256], 8).unwrap(), 8.0);
        let mut c = vec![0; 256];
        c[17] = 1000;
        assert_eq!(min_entropy(&c, 8).unwrap(), 0.0);
        assert!(min_entropy(&[0; 4], 2).is_err());
        assert!(min_entropy(&[1; 5], 2).is_err());
    }

    #[test]
    fn arcsine_edge_bin() {
        // edge-bin mass from numerical quadrature of the arcsine density,
        // which is accurate to a few 1e-10 near the singular endpoint
        let p_edge = arcsine_cdf(-1.0 + 2.0 / 256.0);
        assert!((p_edge - 0.03981468553655128).abs() < 1e-9);
        assert!((arcsine_min_entropy(8) - 4.650555526771186).abs() < 1e-8);
    }

    #[test]
    fn histogram_counts_everything() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin()).collect();
        let h = Histogram::from_values(&v, 64).unwrap();
        assert_eq!(h.total(), 1000);
        assert_eq!(h.edges.len(), 65);
        assert_eq!(code_histogram(&[0, 3, 3, 1], 2), vec![1, 1, 0, 2]);
    }

    proptest! {
        #[test]
        fn bounds_and_merging(counts in proptest::collection::vec(0u64..50, 16), i in 0usize..16, j in 0usize..16) {
            prop_assume!(counts.iter().sum::<u64>() > 0 && i != j);
            let h = min_entropy(&counts, 4).unwrap();
            prop_assert!((0.0..=4.0).contains(&h));
            let mut merged = counts.clone();
            merged[i] += merged[j];
            merged[j] = 0;
            prop_assert!(min_entropy(&merged, 4).unwrap() <= h + 1e-12);
        }
    }
}
