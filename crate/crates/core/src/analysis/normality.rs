use serde::Serialize;

use crate::error::{Error, Result};

/// D'Agostino–Pearson omnibus test result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalityTest {
    pub n: usize,
    pub z_skewness: f64,
    pub z_kurtosis: f64,
    /// K² = Z_s² + Z_k², χ² with two degrees of freedom under normality.
    pub statistic: f64,
    pub p_value: f64,
}

/// Central moments m2, m3, m4 (population normalization).
fn central_moments(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

/// Normal approximation of the sample skewness √b1.
fn skew_z(b1: f64, n: f64) -> f64 {
    let mut y = b1 * ((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0))).sqrt();
    let beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0)
        / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    let w2 = -1.0 + (2.0 * (beta2 - 1.0)).sqrt();
    let delta = 1.0 / (0.5 * w2.ln()).sqrt();
    let alpha = (2.0 / (w2 - 1.0)).sqrt();
    if y == 0.0 {
        y = 1.0;
    }
    let r = y / alpha;
    delta * (r + (r * r + 1.0).sqrt()).ln()
}

/// Anscombe–Glynn normal approximation of the sample kurtosis b2.
fn kurtosis_z(b2: f64, n: f64) -> f64 {
    let expected = 3.0 * (n - 1.0) / (n + 1.0);
    let var = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0).powi(2) * (n + 3.0) * (n + 5.0));
    let x = (b2 - expected) / var.sqrt();
    let sqrt_beta1 = 6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0))
        * (6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0))).sqrt();
    let a = 6.0 + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + (1.0 + 4.0 / (sqrt_beta1 * sqrt_beta1)).sqrt());
    let term1 = 1.0 - 2.0 / (9.0 * a);
    let denom = 1.0 + x * (2.0 / (a - 4.0)).sqrt();
    let term2 = denom.signum() * ((1.0 - 2.0 / a) / denom.abs()).cbrt();
    (term1 - term2) / (2.0 / (9.0 * a)).sqrt()
}

/// D'Agostino–Pearson K² normality test.
pub fn dagostino_pearson(values: &[f64]) -> Result<NormalityTest> {
    let n = values.len();
    if n < 20 {
        return Err(Error::InsufficientData(format!(
            "normality test needs at least 20 values, got {n}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("normality test on non-finite values".into()));
    }
    let (m2, m3, m4) = central_moments(values);
    if !(m2 > 0.0) {
        return Err(Error::Degenerate("normality test on constant values".into()));
    }
    let nf = n as f64;
    let z_skewness = skew_z(m3 / m2.powf(1.5), nf);
    let z_kurtosis = kurtosis_z(m4 / (m2 * m2), nf);
    let statistic = z_skewness * z_skewness + z_kurtosis * z_kurtosis;
    Ok(NormalityTest {
        n,
        z_skewness,
        z_kurtosis,
        statistic,
        // χ²₂ survival function
        p_value: (-0.5 * statistic).exp(),
    })
}
