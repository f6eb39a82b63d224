use std::f64::consts::TAU;

use serde::Serialize;

use crate::detection::AnalogTrace;
use crate::error::{Error, Result};
use crate::numeric::wrap_phase;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseFit {
    /// φ in A·cos(θ(t) + φ) + C, wrapped to [−π, π).
    pub phase: f64,
    pub amplitude: f64,
    pub offset: f64,
    pub residual_rms: f64,
    /// False when the fitted oscillation does not clear the residual noise.
    pub confident: bool,
}

fn solve3(m: [[f64; 3]; 3], v: [f64; 3]) -> Option<[f64; 3]> {
    let det = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(m);
    let scale = m.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    if d.abs() <= 1e-12 * scale.powi(3) {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = v[row];
        }
        *o = det(mc) / d;
    }
    Some(out)
}

/// Least-squares phase of an oscillation whose accumulated phase θ(t) is
/// known up to a constant: fits a·cos θ + b·sin θ + C, so φ = atan2(−b, a).
pub fn extract_pulse_phase(segment: &AnalogTrace, theta: impl Fn(f64) -> f64) -> Result<PhaseFit> {
    if segment.len() < 8 {
        return Err(Error::InsufficientData("phase fit needs at least 8 samples".into()));
    }
    let th: Vec<f64> = (0..segment.len()).map(|i| theta(segment.time(i))).collect();
    let span = th.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x))
        - th.iter().fold(f64::INFINITY, |m, &x| m.min(x));
    if span < 2.0 * TAU {
        return Err(Error::InsufficientData(format!(
            "segment covers {:.2} beat periods, need at least 2",
            span / TAU
        )));
    }
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for (&t, &y) in th.iter().zip(&segment.values) {
        let row = [t.cos(), t.sin(), 1.0];
        for r in 0..3 {
            for c in 0..3 {
                ata[r][c] += row[r] * row[c];
            }
            aty[r] += row[r] * y;
        }
    }
    let [a, b, offset] =
        solve3(ata, aty).ok_or_else(|| Error::Degenerate("phase fit design matrix is singular".into()))?;
    let sse: f64 = th
        .iter()
        .zip(&segment.values)
        .map(|(&t, &y)| {
            let r = y - (a * t.cos() + b * t.sin() + offset);
            r * r
        })
        .sum();
    let residual_rms = (sse / segment.len() as f64).sqrt();
    let amplitude = a.hypot(b);
    Ok(PhaseFit {
        phase: wrap_phase((-b).atan2(a)),
        amplitude,
        offset,
        residual_rms,
        confident: amplitude > 2.0 * residual_rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;
    use rand_xoshiro::Xoshiro256PlusPlus;
    use std::f64::consts::PI;

    const OMEGA: f64 = TAU * 2.0;

    fn segment(phi: f64, noise_rms: f64, seed: u64) -> AnalogTrace {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let v = (0..150)
            .map(|i| {
                let t = i as f64 * 0.01;
                1.5 * (OMEGA * t + phi).cos() + 0.3 + noise_rms * rng.sample::<f64, _>(StandardNormal)
            })
            .collect();
        AnalogTrace::new(0.0, 0.01, v).unwrap()
    }

    #[test]
    fn noiseless_zero_phase() {
        let fit = extract_pulse_phase(&segment(0.0, 0.0, 0), |t| OMEGA * t).unwrap();
        assert!(fit.phase.abs() < 1e-10);
        assert!((fit.amplitude - 1.5).abs() < 1e-10);
        assert!((fit.offset - 0.3).abs() < 1e-10);
    }

    #[test]
    fn twenty_db_snr() {
        // signal power A²/2 over noise variance = 100
        let noise = 1.5 / 2f64.sqrt() / 10.0;
        for seed in 0..20 {
            let fit = extract_pulse_phase(&segment(1.0, noise, seed), |t| OMEGA * t).unwrap();
            assert!((fit.phase - 1.0).abs() < 0.05, "{}", fit.phase);
            assert!(fit.confident);
        }
    }

    #[test]
    fn pi_shift() {
        let noise = 1.5 / 2f64.sqrt() / 10.0;
        let a = extract_pulse_phase(&segment(0.4, noise, 1), |t| OMEGA * t).unwrap();
        let b = extract_pulse_phase(&segment(0.4 + PI, noise, 2), |t| OMEGA * t).unwrap();
        assert!((wrap_phase(b.phase - a.phase).abs() - PI).abs() < 0.05);
    }

    #[test]
    fn flags_noise_only_segments() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(4);
        let v = (0..150).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let tr = AnalogTrace::new(0.0, 0.01, v).unwrap();
        assert!(!extract_pulse_phase(&tr, |t| OMEGA * t).unwrap().confident);
    }

    #[test]
    fn too_short_segment() {
        let tr = segment(0.0, 0.0, 0).window(0.0, 0.6);
        assert!(matches!(
            extract_pulse_phase(&tr, |t| OMEGA * t),
            Err(Error::InsufficientData(_))
        ));
    }
}
