use num_complex::Complex64;

/// Ring buffer of past field pairs, read back at a fixed delay with linear
/// interpolation between stored steps.
#[derive(Debug, Clone)]
pub struct DelayLine {
    buf: Vec<[Complex64; 2]>,
    head: usize,
    lag: usize,
    frac: f64,
}

impl DelayLine {
    /// Buffer for delay `tau_d` at step `dt`, pre-filled with `initial`.
    ///
    /// Depth is ⌈τ_d/dt⌉ + 2.
    pub fn new(tau_d: f64, dt: f64, initial: [Complex64; 2]) -> Self {
        let ratio = tau_d / dt;
        let mut lag = ratio.floor();
        let mut frac = ratio - lag;
        // 0.02 / 1e-4 lands a hair below 200
        if frac > 1.0 - 1e-9 {
            lag += 1.0;
            frac = 0.0;
        } else if frac < 1e-9 {
            frac = 0.0;
        }
        let depth = ratio.ceil() as usize + 2;
        Self {
            buf: vec![initial; depth],
            head: 0,
            lag: lag as usize,
            frac,
        }
    }

    pub fn depth(&self) -> usize {
        self.buf.len()
    }

    /// Appends the newest field pair.
    #[inline]
    pub fn push(&mut self, fields: [Complex64; 2]) {
        self.head += 1;
        if self.head == self.buf.len() {
            self.head = 0;
        }
        self.buf[self.head] = fields;
    }

    #[inline]
    fn back(&self, k: usize) -> [Complex64; 2] {
        let i = if self.head >= k { self.head - k } else { self.head + self.buf.len() - k };
        self.buf[i]
    }

    /// Fields at `t_newest - tau_d`.
    #[inline]
    pub fn delayed(&self) -> [Complex64; 2] {
        let a = self.back(self.lag);
        if self.frac == 0.0 {
            return a;
        }
        let b = self.back(self.lag + 1);
        let w = self.frac;
        [a[0] * (1.0 - w) + b[0] * w, a[1] * (1.0 - w) + b[1] * w]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, -x)
    }

    #[test]
    fn exact_integer_delay() {
        let mut d = DelayLine::new(0.02, 1e-4, [c(0.0), c(0.0)]);
        assert_eq!(d.depth(), 202);
        for k in 1..=500 {
            d.push([c(k as f64), c(2.0 * k as f64)]);
            let got = d.delayed();
            let want = if k >= 200 { (k - 200) as f64 } else { 0.0 };
            assert_eq!(got[0], c(want), "step {k}");
            assert_eq!(got[1], c(2.0 * want));
        }
    }

    #[test]
    fn fractional_delay_interpolates() {
        // delay of 2.5 steps on a linear ramp returns the ramp 2.5 back
        let mut d = DelayLine::new(2.5, 1.0, [c(0.0), c(0.0)]);
        for k in 1..=20 {
            d.push([c(k as f64), c(0.0)]);
            if k >= 3 {
                let got = d.delayed()[0];
                assert!((got.re - (k as f64 - 2.5)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn prefilled_with_initial_state() {
        let init = [c(0.5), c(-0.25)];
        let d = DelayLine::new(1.0, 0.1, init);
        assert_eq!(d.delayed(), init);
    }
}
