//! Euler–Maruyama integration of the coupled stochastic rate equations.
//!
//! Dimensionless fields E₁, E₂ and inversions N₁, N₂ obey
//!
//! ```text
//! dE₁/dt = γ(1+iα)N₁E₁ + κe^{iψ}E₂(t−τ_d) + √R ξ₁
//! dE₂/dt = γ(1+iα)N₂E₂ + κe^{iψ}E₁(t−τ_d) + i[Ω+β(t)]E₂ + √R ξ₂
//! τ dN/dt = P − N − (1+2N)|E|²
//! ```
//!
//! with unit-intensity complex white noise per quadrature. The detuning
//! rotation of E₂ is applied exactly (the step multiplies E₂ by the phase
//! factor of Ω+β(t) integrated over the step); every other term is an
//! explicit Euler–Maruyama increment. Treating the rotation explicitly would
//! inflate |E₂| by √(1+(Ω dt)²) per step, which the gain clamps by lowering
//! N₂ and which α then turns into a spurious frequency shift of order
//! αΩ²dt/2.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::history::DelayLine;
use super::params::{
    chirp_detuning, pump_value, CouplingMode, CouplingSpec, DetuningSpec, LaserParams, PumpMode,
    PumpSpec,
};
use super::trajectory::Trajectory;
use crate::error::{config_err, Error, Result};
use crate::rng::{cycle_stream, StreamRng, SLOT_LASER1, SLOT_LASER2};

/// Integration grid and seeding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimGrid {
    /// Integration step (ns).
    pub dt: f64,
    pub n_cycles: u64,
    /// Record every `record_stride`-th step.
    pub record_stride: usize,
    pub seed: u64,
    /// Noise draws summed per step. A run at `dt` with 2 substeps consumes
    /// exactly the draws of a run at `dt/2` with 1, which couples the two
    /// noise paths for convergence studies.
    pub noise_substeps: u32,
}

impl Default for SimGrid {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            n_cycles: 10,
            record_stride: 100,
            seed: 1,
            noise_substeps: 1,
        }
    }
}

/// Everything needed to integrate one laser pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub laser1: LaserParams,
    pub laser2: LaserParams,
    pub coupling: CouplingSpec,
    pub detuning: DetuningSpec,
    /// Laser 1 drive; CW at P̄₁ = 8 by default.
    #[serde(default = "default_pump1")]
    pub pump1: PumpSpec,
    /// Laser 2 drive; its period defines the cycle grid.
    pub pump2: PumpSpec,
    pub grid: SimGrid,
}

fn default_pump1() -> PumpSpec {
    PumpSpec::cw(8.0)
}

impl SimConfig {
    /// Published device values: CW laser 1, gain-switched laser 2, weak
    /// (high-loss) coupling.
    pub fn table_defaults() -> Self {
        Self {
            pump1: default_pump1(),
            ..Self::default()
        }
    }

    pub fn cycle_period(&self) -> f64 {
        self.pump2.t_mod
    }

    pub fn validate(&self) -> Result<()> {
        self.laser1.validate()?;
        self.laser2.validate()?;
        self.coupling.validate()?;
        self.detuning.validate()?;
        self.pump1.validate()?;
        self.pump2.validate()?;
        let g = &self.grid;
        if !(g.dt > 0.0 && g.dt.is_finite()) {
            return Err(config_err(format!("dt must be > 0, got {}", g.dt)));
        }
        if g.record_stride < 1 {
            return Err(config_err("record_stride must be >= 1"));
        }
        if g.noise_substeps < 1 {
            return Err(config_err("noise_substeps must be >= 1"));
        }
        if self.coupling.mode == CouplingMode::Delayed
            && self.coupling.kappa > 0.0
            && g.dt >= self.coupling.tau_d
        {
            return Err(config_err(format!(
                "dt = {} must be smaller than tau_d = {} in delayed mode",
                g.dt, self.coupling.tau_d
            )));
        }
        steps_per_cycle(self.cycle_period(), g.dt)?;
        Ok(())
    }
}

fn steps_per_cycle(t_mod: f64, dt: f64) -> Result<usize> {
    let ratio = t_mod / dt;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > 1e-6 * n.max(1.0) {
        return Err(config_err(format!(
            "modulation period {t_mod} ns is not an integer number of steps of {dt} ns"
        )));
    }
    Ok(n as usize)
}

/// Instantaneous state of the laser pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserPairState {
    pub e1: Complex64,
    pub e2: Complex64,
    pub n1: f64,
    pub n2: f64,
    /// Time (ns).
    pub t: f64,
}

impl LaserPairState {
    /// Both fields at 10⁻³(1+i), inversions at zero.
    pub fn initial() -> Self {
        let e = Complex64::new(1e-3, 1e-3);
        Self {
            e1: e,
            e2: e,
            n1: 0.0,
            n2: 0.0,
            t: 0.0,
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        let t = self.t;
        if !(self.e1.re.is_finite() && self.e1.im.is_finite()) {
            return Err(Error::Divergence { variable: "E1", t });
        }
        if !(self.e2.re.is_finite() && self.e2.im.is_finite()) {
            return Err(Error::Divergence { variable: "E2", t });
        }
        if !self.n1.is_finite() {
            return Err(Error::Divergence { variable: "N1", t });
        }
        if !self.n2.is_finite() {
            return Err(Error::Divergence { variable: "N2", t });
        }
        Ok(())
    }
}

/// Precomputed right-hand-side coefficients.
#[derive(Debug, Clone, Copy)]
pub struct LkModel {
    /// γ(1+iα) per laser.
    pub gain: [Complex64; 2],
    pub inv_tau: [f64; 2],
    /// κ·e^{iψ}
    pub coupling: Complex64,
}

impl LkModel {
    pub fn new(lasers: &[LaserParams; 2], coupling: &CouplingSpec) -> Self {
        let g = |p: &LaserParams| Complex64::new(p.gamma, p.gamma * p.alpha);
        Self {
            gain: [g(&lasers[0]), g(&lasers[1])],
            inv_tau: [1.0 / lasers[0].tau, 1.0 / lasers[1].tau],
            coupling: Complex64::from_polar(coupling.kappa, coupling.psi_folded()),
        }
    }
}

/// External inputs to a single step.
#[derive(Debug, Clone, Copy)]
pub struct Drive {
    pub pump: [f64; 2],
    /// Mean of Ω + β(t) over the step, acting on laser 2 (rad/ns).
    pub detuning: f64,
    /// Field injected into each laser: `coupled[0]` is the (possibly
    /// delayed) E₂ seen by laser 1, `coupled[1]` the E₁ seen by laser 2.
    pub coupled: [Complex64; 2],
    /// Noise increments, already scaled by √(R·dt).
    pub noise: [Complex64; 2],
}

/// One Euler–Maruyama step of size `dt`.
#[inline]
pub fn lk_step(
    state: &LaserPairState,
    model: &LkModel,
    drive: &Drive,
    dt: f64,
) -> Result<LaserPairState> {
    let LaserPairState { e1, e2, n1, n2, t } = *state;
    let i1 = e1.norm_sqr();
    let i2 = e2.norm_sqr();

    let de1 = model.gain[0] * n1 * e1 + model.coupling * drive.coupled[0];
    let de2 = model.gain[1] * n2 * e2 + model.coupling * drive.coupled[1];
    let rotation = Complex64::from_polar(1.0, drive.detuning * dt);
    let dn1 = model.inv_tau[0] * (drive.pump[0] - n1 - (1.0 + 2.0 * n1) * i1);
    let dn2 = model.inv_tau[1] * (drive.pump[1] - n2 - (1.0 + 2.0 * n2) * i2);

    let next = LaserPairState {
        e1: e1 + de1 * dt + drive.noise[0],
        e2: e2 * rotation + de2 * dt + drive.noise[1],
        n1: n1 + dn1 * dt,
        n2: n2 + dn2 * dt,
        t: t + dt,
    };
    let probe = next.e1.re + next.e1.im + next.e2.re + next.e2.im + next.n1 + next.n2;
    if !probe.is_finite() {
        next.check_finite()?;
    }
    Ok(next)
}

#[derive(Debug, Clone)]
enum PumpTable {
    Constant(f64),
    PerStep(Vec<f64>),
}

impl PumpTable {
    fn build(spec: &PumpSpec, t_mod: f64, dt: f64, steps: usize) -> Self {
        match spec.mode {
            PumpMode::Cw => PumpTable::Constant(spec.p_bar),
            PumpMode::GainSwitched => PumpTable::PerStep(
                (0..steps)
                    .map(|j| pump_value(j as f64 * dt - t_mod / 2.0, spec))
                    .collect(),
            ),
        }
    }

    #[inline]
    fn at(&self, j: usize) -> f64 {
        match self {
            PumpTable::Constant(p) => *p,
            PumpTable::PerStep(v) => v[j],
        }
    }
}

/// A validated configuration with its per-step tables, shared by every
/// integrator running it.
#[derive(Debug, Clone)]
pub struct SimPlan {
    cfg: SimConfig,
    steps_per_cycle: usize,
    pumps: [PumpTable; 2],
    model: LkModel,
    noise_scale: [f64; 2],
}

impl SimPlan {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let dt = cfg.grid.dt;
        let t_mod = cfg.cycle_period();
        let steps = steps_per_cycle(t_mod, dt)?;
        let subs = f64::from(cfg.grid.noise_substeps);
        Ok(Self {
            cfg: cfg.clone(),
            steps_per_cycle: steps,
            pumps: [
                PumpTable::build(&cfg.pump1, t_mod, dt, steps),
                PumpTable::build(&cfg.pump2, t_mod, dt, steps),
            ],
            model: LkModel::new(&[cfg.laser1, cfg.laser2], &cfg.coupling),
            noise_scale: [
                (cfg.laser1.r_sp * dt / subs).sqrt(),
                (cfg.laser2.r_sp * dt / subs).sqrt(),
            ],
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn steps_per_cycle(&self) -> usize {
        self.steps_per_cycle
    }

    pub fn dt(&self) -> f64 {
        self.cfg.grid.dt
    }

    pub fn cycle_period(&self) -> f64 {
        self.cfg.cycle_period()
    }

    pub fn record_interval(&self) -> f64 {
        self.cfg.grid.dt * self.cfg.grid.record_stride as f64
    }

    /// State used to start an independently simulated cycle `k`: each laser
    /// sits at its rest point for the pump value at the cycle start, i.e. on
    /// the lasing fixed point (|E|² = P, N = 0, zero phase) above threshold
    /// and at E = 10⁻³(1+i), N = P below it.
    pub fn cycle_start_state(&self, cycle: u64) -> LaserPairState {
        let rest = |p: f64| {
            if p > 0.0 {
                (Complex64::new(p.sqrt(), 0.0), 0.0)
            } else {
                (Complex64::new(1e-3, 1e-3), p)
            }
        };
        let (e1, n1) = rest(self.pumps[0].at(0));
        let (e2, n2) = rest(self.pumps[1].at(0));
        LaserPairState {
            e1,
            e2,
            n1,
            n2,
            t: cycle as f64 * self.cycle_period(),
        }
    }

    pub fn integrator(&self, state: LaserPairState) -> Integrator<'_> {
        Integrator::new(self, state)
    }

    /// Integrates `n_cycles` consecutive cycles from the standard initial
    /// condition and returns the decimated trajectory.
    pub fn simulate(&self) -> Result<Trajectory> {
        let mut integ = self.integrator(LaserPairState::initial());
        let stride = self.cfg.grid.record_stride;
        let mut rec = Recorder::new(self, 0);
        for cycle in 0..self.cfg.grid.n_cycles {
            rec.mark_cycle(cycle);
            integ.run_cycle_recording(cycle, stride, |g, s| rec.offer(g, s))?;
        }
        Ok(rec.finish())
    }

    /// Integrates cycle `k` alone, starting from [`Self::cycle_start_state`].
    pub fn simulate_cycle(&self, cycle: u64) -> Result<Trajectory> {
        let mut integ = self.integrator(self.cycle_start_state(cycle));
        let stride = self.cfg.grid.record_stride;
        let mut rec = Recorder::new(self, cycle);
        rec.mark_cycle(cycle);
        integ.run_cycle_recording(cycle, stride, |g, s| rec.offer(g, s))?;
        Ok(rec.finish())
    }

    /// Independent cycles in parallel, returned in cycle order.
    pub fn simulate_cycles(&self, cycles: std::ops::Range<u64>) -> Result<Vec<Trajectory>> {
        let idx: Vec<u64> = cycles.collect();
        idx.par_iter().map(|&k| self.simulate_cycle(k)).collect()
    }

    /// Ensemble counterpart of [`Self::simulate`]: every cycle is
    /// integrated independently and the results are concatenated.
    pub fn simulate_independent(&self) -> Result<Trajectory> {
        let parts = self.simulate_cycles(0..self.cfg.grid.n_cycles)?;
        Ok(Trajectory::concat(parts))
    }
}

struct Recorder {
    traj: Trajectory,
    started: bool,
}

impl Recorder {
    fn new(plan: &SimPlan, first_cycle: u64) -> Self {
        let mut traj = Trajectory::empty(
            plan.dt(),
            plan.cfg.grid.record_stride,
            plan.cycle_period(),
        );
        traj.first_cycle = first_cycle;
        Self {
            traj,
            started: false,
        }
    }

    fn mark_cycle(&mut self, _cycle: u64) {
        let idx = self.traj.len();
        self.traj.cycle_starts.push(idx);
    }

    #[inline]
    fn offer(&mut self, global_step: u64, s: &LaserPairState) {
        if !self.started {
            self.traj.t0 = global_step as f64 * self.traj.dt;
            self.started = true;
        }
        self.traj.push(s);
    }

    fn finish(self) -> Trajectory {
        self.traj
    }
}

/// Steps between divergence checks inside a cycle. A blown-up state stays
/// non-finite, so checking periodically loses nothing.
const FINITE_CHECK_INTERVAL: usize = 1024;

/// Sequential integrator carrying the delay line between cycles.
pub struct Integrator<'p> {
    plan: &'p SimPlan,
    state: LaserPairState,
    history: Option<DelayLine>,
}

impl<'p> Integrator<'p> {
    pub fn new(plan: &'p SimPlan, state: LaserPairState) -> Self {
        let c = &plan.cfg.coupling;
        let history = (c.mode == CouplingMode::Delayed && c.kappa > 0.0)
            .then(|| DelayLine::new(c.tau_d, plan.dt(), [state.e1, state.e2]));
        Self {
            plan,
            state,
            history,
        }
    }

    pub fn state(&self) -> &LaserPairState {
        &self.state
    }

    /// Integrates one full modulation cycle. `on_record` sees the state at
    /// the start of every step whose global index is a multiple of `stride`.
    pub fn run_cycle_recording<F>(&mut self, cycle: u64, stride: usize, mut on_record: F) -> Result<()>
    where
        F: FnMut(u64, &LaserPairState),
    {
        let plan = self.plan;
        let cfg = &plan.cfg;
        let dt = cfg.grid.dt;
        let spc = plan.steps_per_cycle;
        let t_mod = cfg.cycle_period();
        let cycle_t0 = cycle as f64 * t_mod;
        let subs = cfg.grid.noise_substeps;
        let scale = plan.noise_scale;
        let kappa_on = cfg.coupling.kappa > 0.0;
        let base = cycle * spc as u64;
        let stride = stride.max(1);
        let mut next_record = ((stride as u64 - base % stride as u64) % stride as u64) as usize;

        let mut rng1 = cycle_stream(cfg.grid.seed, cycle, SLOT_LASER1);
        let mut rng2 = cycle_stream(cfg.grid.seed, cycle, SLOT_LASER2);
        let model = &plan.model;
        let [g1, g2] = model.gain;
        let [r1, r2] = model.inv_tau;
        let k = model.coupling;
        // phase factor of laser 2's detuning over step j, updated by the
        // constant chirp increment β₀dt² from one step to the next
        let detuning_mid = chirp_detuning(cycle_t0 + 0.5 * dt, cycle_t0, &cfg.detuning);
        let mut rotation = Complex64::from_polar(1.0, detuning_mid * dt);
        let chirp_step = Complex64::from_polar(1.0, cfg.detuning.beta0 * dt * dt);
        let instantaneous = kappa_on && self.history.is_none();

        // The state lives in locals for the whole cycle; `self.state` is
        // only refreshed where a caller can observe it.
        let LaserPairState { mut e1, mut e2, mut n1, mut n2, .. } = self.state;
        for j in 0..spc {
            if j == next_record {
                self.state = LaserPairState { e1, e2, n1, n2, t: cycle_t0 + j as f64 * dt };
                on_record(base + j as u64, &self.state);
                next_record += stride;
            }

            let (c1, c2) = if instantaneous {
                (e2, e1)
            } else if let Some(h) = &self.history {
                let d = h.delayed();
                (d[1], d[0])
            } else {
                (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
            };
            let (p1, p2) = (plan.pumps[0].at(j), plan.pumps[1].at(j));
            let i1 = e1.norm_sqr();
            let i2 = e2.norm_sqr();
            let de1 = g1 * n1 * e1 + k * c1;
            let de2 = g2 * n2 * e2 + k * c2;
            n1 += dt * r1 * (p1 - n1 - (1.0 + 2.0 * n1) * i1);
            n2 += dt * r2 * (p2 - n2 - (1.0 + 2.0 * n2) * i2);
            e1 += de1 * dt + draw_noise(&mut rng1, scale[0], subs);
            e2 = e2 * rotation + de2 * dt + draw_noise(&mut rng2, scale[1], subs);
            rotation *= chirp_step;
            if let Some(h) = &mut self.history {
                h.push([e1, e2]);
            }
            if j % FINITE_CHECK_INTERVAL == FINITE_CHECK_INTERVAL - 1 || j + 1 == spc {
                self.state = LaserPairState { e1, e2, n1, n2, t: cycle_t0 + (j + 1) as f64 * dt };
                self.state.check_finite()?;
            }
        }
        Ok(())
    }

    /// Integrates one full modulation cycle without recording.
    pub fn run_cycle(&mut self, cycle: u64) -> Result<()> {
        self.run_cycle_recording(cycle, usize::MAX, |_, _| {})
    }
}

#[inline]
fn draw_noise(rng: &mut StreamRng, scale: f64, substeps: u32) -> Complex64 {
    if scale == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let mut re = 0.0;
    let mut im = 0.0;
    for _ in 0..substeps {
        re += rng.sample::<f64, _>(StandardNormal);
        im += rng.sample::<f64, _>(StandardNormal);
    }
    Complex64::new(re * scale, im * scale)
}
