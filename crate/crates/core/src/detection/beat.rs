use serde::Serialize;

use super::trace::AnalogTrace;

/// Instantaneous beat frequency `f` (GHz) reported at time `t` (ns).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyPoint {
    pub t: f64,
    pub f: f64,
}

/// Zero-crossing frequency track of a mean-free trace: successive crossings
/// half a period apart give `f = 1/(2Δt)` at their midpoint.
pub fn instantaneous_beat_frequency(trace: &AnalogTrace) -> Vec<FrequencyPoint> {
    let v = &trace.values;
    let mut crossings = Vec::new();
    for i in 1..v.len() {
        let (a, b) = (v[i - 1], v[i]);
        if (a > 0.0) != (b > 0.0) {
            let frac = if a == b { 0.0 } else { a / (a - b) };
            crossings.push(trace.time(i - 1) + frac * trace.interval);
        }
    }
    crossings
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| FrequencyPoint {
            t: 0.5 * (w[0] + w[1]),
            f: 0.5 / (w[1] - w[0]),
        })
        .collect()
}

/// Locates the frequency minimum of a track inside `[t_lo, t_hi]` by fitting
/// a symmetric V, `f ≈ s·|t − t*| + c`, with a scan over `t*` followed by a
/// local refinement. Returns `None` with fewer than 4 points in the window.
pub fn estimate_nzd(track: &[FrequencyPoint], t_lo: f64, t_hi: f64) -> Option<f64> {
    let pts: Vec<_> = track.iter().filter(|p| p.t >= t_lo && p.t <= t_hi).collect();
    if pts.len() < 4 {
        return None;
    }
    let sse = |t_star: f64| -> f64 {
        let n = pts.len() as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for p in &pts {
            let x = (p.t - t_star).abs();
            sx += x;
            sy += p.f;
            sxx += x * x;
            sxy += x * p.f;
        }
        let det = n * sxx - sx * sx;
        if det.abs() < 1e-300 {
            return f64::INFINITY;
        }
        let s = (n * sxy - sx * sy) / det;
        let c = (sy - s * sx) / n;
        pts.iter()
            .map(|p| {
                let r = p.f - (s * (p.t - t_star).abs() + c);
                r * r
            })
            .sum()
    };
    let steps = 400;
    let h = (t_hi - t_lo) / steps as f64;
    let mut best = (f64::INFINITY, t_lo);
    for k in 0..=steps {
        let t = t_lo + k as f64 * h;
        let e = sse(t);
        if e < best.0 {
            best = (e, t);
        }
    }
    // golden-section refinement within one grid step either side
    let (mut a, mut b) = ((best.1 - h).max(t_lo), (best.1 + h).min(t_hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if sse(c) < sse(d) {
            b = d;
        } else {
            a = c;
        }
    }
    Some(0.5 * (a + b))
}
