use std::io::{BufRead, BufReader, BufWriter, Read, Write};

use num_complex::Complex64;

use super::integrator::LaserPairState;
use crate::error::{Error, Result};

/// Decimated field and inversion record over a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Time of the first record (ns).
    pub t0: f64,
    /// Integration step (ns).
    pub dt: f64,
    pub record_stride: usize,
    /// Modulation period (ns).
    pub cycle_period: f64,
    /// Index of the first cycle covered.
    pub first_cycle: u64,
    pub e1: Vec<Complex64>,
    pub e2: Vec<Complex64>,
    pub n1: Vec<f64>,
    pub n2: Vec<f64>,
    /// Record index at which each covered cycle starts.
    pub cycle_starts: Vec<usize>,
}

impl Trajectory {
    pub fn empty(dt: f64, record_stride: usize, cycle_period: f64) -> Self {
        Self {
            t0: 0.0,
            dt,
            record_stride,
            cycle_period,
            first_cycle: 0,
            e1: Vec::new(),
            e2: Vec::new(),
            n1: Vec::new(),
            n2: Vec::new(),
            cycle_starts: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.e1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e1.is_empty()
    }

    pub fn record_interval(&self) -> f64 {
        self.dt * self.record_stride as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.record_interval()
    }

    /// Start time of covered cycle `i` (0-based within this trajectory).
    pub fn cycle_start_time(&self, i: usize) -> f64 {
        (self.first_cycle + i as u64) as f64 * self.cycle_period
    }

    pub fn state(&self, i: usize) -> LaserPairState {
        LaserPairState {
            e1: self.e1[i],
            e2: self.e2[i],
            n1: self.n1[i],
            n2: self.n2[i],
            t: self.time(i),
        }
    }

    pub(crate) fn push(&mut self, s: &LaserPairState) {
        self.e1.push(s.e1);
        self.e2.push(s.e2);
        self.n1.push(s.n1);
        self.n2.push(s.n2);
    }

    /// Joins consecutive pieces in order.
    pub fn concat(parts: Vec<Trajectory>) -> Trajectory {
        let mut iter = parts.into_iter();
        let Some(mut out) = iter.next() else {
            return Trajectory::empty(1.0, 1, 1.0);
        };
        for p in iter {
            let offset = out.len();
            out.cycle_starts
                .extend(p.cycle_starts.iter().map(|&c| c + offset));
            out.e1.extend(p.e1);
            out.e2.extend(p.e2);
            out.n1.extend(p.n1);
            out.n2.extend(p.n2);
        }
        out
    }

    /// CSV with `#`-prefixed metadata lines, a header row and one row per
    /// record: t, Re E₁, Im E₁, Re E₂, Im E₂, N₁, N₂.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut w = BufWriter::new(w);
        writeln!(w, "# qes trajectory v1")?;
        writeln!(w, "# t0_ns={}", self.t0)?;
        writeln!(w, "# dt_ns={}", self.dt)?;
        writeln!(w, "# record_stride={}", self.record_stride)?;
        writeln!(w, "# cycle_period_ns={}", self.cycle_period)?;
        writeln!(w, "# first_cycle={}", self.first_cycle)?;
        let starts: Vec<String> = self.cycle_starts.iter().map(|c| c.to_string()).collect();
        writeln!(w, "# cycle_starts={}", starts.join(";"))?;
        writeln!(w, "t_ns,re_e1,im_e1,re_e2,im_e2,n1,n2")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                self.time(i),
                self.e1[i].re,
                self.e1[i].im,
                self.e2[i].re,
                self.e2[i].im,
                self.n1[i],
                self.n2[i]
            )?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Trajectory> {
        let reader = BufReader::new(r);
        let mut traj = Trajectory::empty(1.0, 1, 1.0);
        let mut saw_header = false;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                let meta = meta.trim();
                let Some((key, value)) = meta.split_once('=') else {
                    continue;
                };
                let bad = || Error::Format(format!("line {}: bad value for {key}", lineno + 1));
                match key {
                    "t0_ns" => traj.t0 = value.parse().map_err(|_| bad())?,
                    "dt_ns" => traj.dt = value.parse().map_err(|_| bad())?,
                    "record_stride" => traj.record_stride = value.parse().map_err(|_| bad())?,
                    "cycle_period_ns" => traj.cycle_period = value.parse().map_err(|_| bad())?,
                    "first_cycle" => traj.first_cycle = value.parse().map_err(|_| bad())?,
                    "cycle_starts" => {
                        traj.cycle_starts = value
                            .split(';')
                            .filter(|s| !s.is_empty())
                            .map(|s| s.parse().map_err(|_| bad()))
                            .collect::<Result<_>>()?
                    }
                    _ => {}
                }
                continue;
            }
            if !saw_header {
                saw_header = true;
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Format(format!("line {}: {e}", lineno + 1)))?;
            if cols.len() != 7 {
                return Err(Error::Format(format!(
                    "line {}: expected 7 columns, got {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            traj.e1.push(Complex64::new(cols[1], cols[2]));
            traj.e2.push(Complex64::new(cols[3], cols[4]));
            traj.n1.push(cols[5]);
            traj.n2.push(cols[6]);
        }
        if let Some(&last) = traj.cycle_starts.last() {
            if last > traj.len() || traj.cycle_starts.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Format("inconsistent cycle_starts".into()));
            }
        }
        Ok(traj)
    }
}
