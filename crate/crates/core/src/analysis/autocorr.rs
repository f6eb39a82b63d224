use serde::Serialize;

use crate::error::{Error, Result};

/// Autocovariance Γ(k) and its normalization ρ(k) = Γ(k)/Γ(0).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Autocorrelation {
    pub n: usize,
    pub gamma: Vec<f64>,
    pub rho: Vec<f64>,
    /// Finite-size floor 1/√n.
    pub noise_floor: f64,
}

/// Γ(k) = mean over i of (x_i − m)(x_{i+k} − m) for k = 0…max_lag.
fn autocovariance(samples: &[f64], max_lag: usize) -> Vec<f64> {
    let n = samples.len();
    let m = samples.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = samples.iter().map(|x| x - m).collect();
    (0..=max_lag)
        .map(|k| {
            let s: f64 = centred[..n - k].iter().zip(&centred[k..]).map(|(a, b)| a * b).sum();
            s / (n - k) as f64
        })
        .collect()
}

fn check_len(samples: &[f64], max_lag: usize, what: &str) -> Result<()> {
    if samples.len() <= max_lag {
        return Err(Error::InsufficientData(format!(
            "{what}: {} samples cannot support lag {max_lag}",
            samples.len()
        )));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate(format!("{what}: non-finite sample")));
    }
    Ok(())
}

pub fn autocorrelation(samples: &[f64], max_lag: usize) -> Result<Autocorrelation> {
    check_len(samples, max_lag, "autocorrelation")?;
    let gamma = autocovariance(samples, max_lag);
    if !(gamma[0] > 0.0) {
        return Err(Error::Degenerate("autocorrelation of zero-variance samples".into()));
    }
    let rho = gamma.iter().map(|g| g / gamma[0]).collect();
    Ok(Autocorrelation {
        n: samples.len(),
        noise_floor: 1.0 / (samples.len() as f64).sqrt(),
        gamma,
        rho,
    })
}

/// Γ_x = Γ_y − Γ_n: in-pulse autocovariance with the detection-noise
/// contribution, measured on off-pulse samples, removed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseSubtracted {
    pub n: usize,
    pub gamma: Vec<f64>,
    /// Γ_x(k)/Γ_x(0); absent when the subtraction leaves no positive
    /// variance (e.g. identical in- and off-pulse streams).
    pub rho: Option<Vec<f64>>,
    pub noise_floor: f64,
    pub in_pulse: Vec<f64>,
    pub off_pulse: Vec<f64>,
}

pub fn noise_subtracted_autocorrelation(
    in_pulse: &[f64],
    off_pulse: &[f64],
    max_lag: usize,
) -> Result<NoiseSubtracted> {
    check_len(in_pulse, max_lag, "in-pulse autocorrelation")?;
    check_len(off_pulse, max_lag, "off-pulse autocorrelation")?;
    let gy = autocovariance(in_pulse, max_lag);
    if !(gy[0] > 0.0) {
        return Err(Error::Degenerate("in-pulse samples have zero variance".into()));
    }
    let gn = autocovariance(off_pulse, max_lag);
    let gamma: Vec<f64> = gy.iter().zip(&gn).map(|(y, n)| y - n).collect();
    let rho = (gamma[0] > 0.0).then(|| gamma.iter().map(|g| g / gamma[0]).collect());
    Ok(NoiseSubtracted {
        n: in_pulse.len(),
        noise_floor: 1.0 / (in_pulse.len() as f64).sqrt(),
        gamma,
        rho,
        in_pulse: gy,
        off_pulse: gn,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn uniform(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        (0..n).map(|_| rng.gen::<f64>()).collect()
    }

    #[test]
    fn floor_for_ten_million() {
        // Γ is only evaluated at lag 0 here, so the large n is cheap
        let x = uniform(1, 10_000_000);
        let a = autocorrelation(&x, 0).unwrap();
        assert!((a.noise_floor - 3.162e-4).abs() < 5e-8);
        assert_eq!(a.rho[0], 1.0);
    }

    #[test]
    fn alternating_sequence() {
        let x: Vec<f64> = (0..10_000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let a = autocorrelation(&x, 3).unwrap();
        assert!((a.rho[1] + 1.0).abs() < 1e-3);
        assert!((a.rho[2] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn iid_uniform_within_floor() {
        let n = 1_000_000;
        let x = uniform(5, n);
        let a = autocorrelation(&x, 500).unwrap();
        let max = a.rho[1..].iter().fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(max < 4.0 / (n as f64).sqrt(), "{max}");
    }

    #[test]
    fn constant_input_is_degenerate() {
        assert!(matches!(autocorrelation(&[2.0; 50], 5), Err(Error::Degenerate(_))));
        assert!(matches!(autocorrelation(&[1.0, 2.0], 5), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn zero_noise_reference_is_plain() {
        let x = uniform(9, 5000);
        let plain = autocorrelation(&x, 20).unwrap();
        let sub = noise_subtracted_autocorrelation(&x, &vec![0.0; 5000], 20).unwrap();
        assert_eq!(plain.gamma, sub.gamma);
        assert_eq!(Some(plain.rho), sub.rho);
    }

    #[test]
    fn recovers_signal_covariance() {
        // x: AR(1) with known covariance; n: independent white noise
        let n = 200_000;
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(21);
        let phi: f64 = 0.6;
        let mut x = vec![0.0; n];
        for i in 1..n {
            x[i] = phi * x[i - 1] + rng.sample::<f64, _>(StandardNormal);
        }
        let noise = |rng: &mut Xoshiro256PlusPlus| -> Vec<f64> {
            (0..n).map(|_| 0.8 * rng.sample::<f64, _>(StandardNormal)).collect()
        };
        let n1 = noise(&mut rng);
        let n2 = noise(&mut rng);
        let y: Vec<f64> = x.iter().zip(&n1).map(|(a, b)| a + b).collect();
        let sub = noise_subtracted_autocorrelation(&y, &n2, 10).unwrap();
        let truth = autocorrelation(&x, 10).unwrap();
        let tol = 5.0 / (n as f64).sqrt();
        for k in 0..=10 {
            let scale = truth.gamma[0];
            assert!(((sub.gamma[k] - truth.gamma[k]) / scale).abs() < tol, "lag {k}");
        }
    }

    #[test]
    fn identical_streams_cancel() {
        let x = uniform(3, 20_000);
        let sub = noise_subtracted_autocorrelation(&x, &x, 50).unwrap();
        let floor = 3.0 / (x.len() as f64).sqrt();
        assert!(sub.gamma.iter().all(|g| (g / sub.in_pulse[0]).abs() < floor));
        assert!(sub.rho.is_none());
    }

    #[test]
    fn reversal_symmetry() {
        let n = 100_000;
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(8);
        let mut x = vec![0.0; n];
        for i in 1..n {
            x[i] = 0.3 * x[i - 1] + rng.sample::<f64, _>(StandardNormal);
        }
        let fwd = autocorrelation(&x, 10).unwrap();
        x.reverse();
        let rev = autocorrelation(&x, 10).unwrap();
        for k in 0..=10 {
            assert!((fwd.rho[k] - rev.rho[k]).abs() < 2.0 / (n as f64).sqrt());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn shift_and_scale_invariance(seed in 0u64..1000, shift in -50.0..50.0f64, scale in 0.1..10.0f64) {
            let x = uniform(seed, 400);
            let a = autocorrelation(&x, 8).unwrap();
            let shifted: Vec<f64> = x.iter().map(|v| v + shift).collect();
            let scaled: Vec<f64> = x.iter().map(|v| v * scale).collect();
            let b = autocorrelation(&shifted, 8).unwrap();
            let c = autocorrelation(&scaled, 8).unwrap();
            for k in 0..=8 {
                prop_assert!((a.gamma[k] - b.gamma[k]).abs() < 1e-9 * a.gamma[0]);
                prop_assert!((c.gamma[k] - scale * scale * a.gamma[k]).abs() < 1e-9 * c.gamma[0]);
                prop_assert!((c.rho[k] - a.rho[k]).abs() < 1e-12);
            }
            prop_assert_eq!(a.rho[0], 1.0);
        }
    }
}
