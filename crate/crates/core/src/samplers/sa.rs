use std::time::Instant;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinState};
use crate::rng::{stream, StreamRng};

/// Geometric temperature schedule ending in one zero-temperature sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaSchedule {
    pub t_max: f64,
    pub t_min: f64,
    pub sweeps: usize,
}

impl SaSchedule {
    /// `T_max = k / ln 2`, `T_min = 2 / ln(100 N)` for connectivity `k`.
    pub fn default_for(model: &IsingModel, sweeps: usize) -> Self {
        let k = model.connectivity().max(1) as f64;
        let n = model.num_vertices().max(1) as f64;
        Self { t_max: k / std::f64::consts::LN_2, t_min: 2.0 / (100.0 * n).ln(), sweeps }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::InvalidArgument("sweep count must be at least 1".into()));
        }
        if !(self.t_min > 0.0 && self.t_max > self.t_min && self.t_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need T_max > T_min > 0 (got T_max={}, T_min={})",
                self.t_max, self.t_min
            )));
        }
        Ok(())
    }

    /// Per-sweep temperatures: `T_max (T_min/T_max)^(s/S)` for `s = 1..S-1`,
    /// then `0`.
    pub fn temperatures(&self) -> Vec<f64> {
        let s_total = self.sweeps as f64;
        let ratio = self.t_min / self.t_max;
        let mut out: Vec<f64> = (1..self.sweeps).map(|s| self.t_max * ratio.powf(s as f64 / s_total)).collect();
        out.push(0.0);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaRun {
    /// Independent restarts `n`.
    pub samples: usize,
    pub schedule: SaSchedule,
    pub seed: u64,
}

impl SaRun {
    pub fn new(model: &IsingModel, samples: usize, sweeps: usize, seed: u64) -> Self {
        Self { samples, schedule: SaSchedule::default_for(model, sweeps), seed }
    }
}

#[derive(Debug, Clone)]
pub struct SaResult {
    pub state: SpinState,
    pub energy: f64,
    pub spin_updates: u64,
}

/// Spins plus maintained local fields `f_i = h_i + Σ_j J_ij x_j`.
#[derive(Debug, Clone)]
pub struct SweepState {
    pub spins: Vec<i8>,
    fields: Vec<f64>,
}

impl SweepState {
    pub fn new(model: &IsingModel, spins: Vec<i8>) -> Self {
        let fields = model.local_fields(&spins);
        Self { spins, fields }
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    /// One Metropolis sweep in ascending vertex order at inverse temperature
    /// `beta`; `beta = ∞` accepts strict decreases only. Returns the energy
    /// change.
    pub fn sweep(&mut self, model: &IsingModel, beta: f64, rng: &mut StreamRng) -> f64 {
        let (offsets, neighbors, couplers) = model.csr();
        let x = &mut self.spins;
        let f = &mut self.fields;
        let mut total = 0.0;
        for i in 0..x.len() {
            let s = f64::from(x[i]);
            let delta = -2.0 * s * f[i];
            let accept = if beta.is_infinite() {
                delta < 0.0
            } else {
                delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp()
            };
            if accept {
                x[i] = -x[i];
                total += delta;
                let twice_new = -2.0 * s;
                let (a, b) = (offsets[i] as usize, offsets[i + 1] as usize);
                for (&n, &j) in neighbors[a..b].iter().zip(&couplers[a..b]) {
                    f[n as usize] += twice_new * j;
                }
            }
        }
        total
    }
}

/// Best state over `n` independently seeded anneals. Sample `i` draws from
/// stream `i` of the run seed, so results do not depend on scheduling.
pub fn run_sa(model: &IsingModel, run: &SaRun) -> Result<SaResult> {
    if run.samples == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    run.schedule.validate()?;
    let betas: Vec<f64> = run.schedule.temperatures().iter().map(|&t| 1.0 / t).collect();
    let n = model.num_vertices();
    let mut best: Option<(f64, Vec<i8>)> = None;
    for sample in 0..run.samples {
        let mut rng = stream(run.seed, sample as u64);
        let start = SpinState::random(n, &mut rng).into_vec();
        let mut st = SweepState::new(model, start);
        for &beta in &betas {
            st.sweep(model, beta, &mut rng);
        }
        let e = model.energy_unchecked(&st.spins);
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, st.spins));
        }
    }
    let (energy, spins) = best.expect("at least one sample");
    Ok(SaResult { state: SpinState::new(spins)?, energy, spin_updates: (run.samples * run.schedule.sweeps * n) as u64 })
}

/// Wall-clock nanoseconds per spin update of a single anneal with `sweeps`
/// sweeps.
pub fn measure_update_rate(model: &IsingModel, sweeps: usize, seed: u64) -> Result<f64> {
    let run = SaRun::new(model, 1, sweeps, seed);
    let t0 = Instant::now();
    let r = run_sa(model, &run)?;
    let ns = t0.elapsed().as_nanos() as f64;
    Ok(ns / r.spin_updates as f64)
}
