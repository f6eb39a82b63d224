use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::sorted_copy;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub distance: f64,
    pub p_value: f64,
}

/// Kolmogorov survival function Q(λ) = 2 Σ (−1)^(k−1) exp(−2k²λ²).
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = sign * (-2.0 * kf * kf * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 * sum.abs().max(1e-300) {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value with the Stephens small-sample correction.
fn ks_p(distance: f64, effective_n: f64) -> f64 {
    let s = effective_n.sqrt();
    kolmogorov_q((s + 0.12 + 0.11 / s) * distance)
}

/// One-sample KS statistic against a continuous CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("KS test on empty sample".into()));
    }
    let sorted = sorted_copy(samples);
    let n = sorted.len() as f64;
    let distance = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        distance,
        p_value: ks_p(distance, n),
    })
}

/// Two-sample KS statistic sup |F_a − F_b|.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData("KS test on empty sample".into()));
    }
    let (sa, sb) = (sorted_copy(a), sorted_copy(b));
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut distance: f64 = 0.0;
    while i < sa.len() && j < sb.len() {
        let x = sa[i].min(sb[j]);
        while i < sa.len() && sa[i] <= x {
            i += 1;
        }
        while j < sb.len() && sb[j] <= x {
            j += 1;
        }
        distance = distance.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(KsResult {
        distance,
        p_value: ks_p(distance, na * nb / (na + nb)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn q_reference_values() {
        // Q(λ) reference values of the Kolmogorov distribution
        assert!((kolmogorov_q(1.0) - 0.26999967167735456).abs() < 1e-12);
        assert!((kolmogorov_q(1.36) - 0.049485876755377876).abs() < 1e-12);
        assert_eq!(kolmogorov_q(0.0), 1.0);
    }

    #[test]
    fn two_sample_identical_and_disjoint() {
        let a: Vec<f64> = (0..100).map(f64::from).collect();
        let r = ks_two_sample(&a, &a).unwrap();
        assert_eq!(r.distance, 0.0);
        let b: Vec<f64> = (200..300).map(f64::from).collect();
        let r = ks_two_sample(&a, &b).unwrap();
        assert_eq!(r.distance, 1.0);
        assert!(r.p_value < 1e-20);
    }

    #[test]
    fn two_sample_handles_ties() {
        let r = ks_two_sample(&[1.0, 1.0, 2.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!(r.distance, 0.0);
        let r = ks_two_sample(&[1.0, 2.0, 3.0], &[2.0]).unwrap();
        assert!((r.distance - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn one_sample_uniform() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(2);
        let x: Vec<f64> = (0..20_000).map(|_| rng.gen::<f64>()).collect();
        let r = ks_one_sample(&x, |v| v.clamp(0.0, 1.0)).unwrap();
        assert!(r.distance < 0.015);
        assert!(r.p_value > 0.001);
        let r = ks_one_sample(&x, |v| (v * v).clamp(0.0, 1.0)).unwrap();
        assert!(r.p_value < 1e-10);
    }
}
