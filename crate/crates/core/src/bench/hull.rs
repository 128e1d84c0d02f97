use std::time::Instant;

use super::ground::relative_error;
use super::stats::median_ci;
use crate::error::{Error, Result};
use crate::ising::IsingModel;
use crate::rng::derive_seed;
use crate::samplers::{run_sa, SaRun};

/// One `(n, S)` cell of an SA parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct HullCell {
    pub n: usize,
    pub sweeps: usize,
    pub median_r: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub median_wall_ms: f64,
    /// `n S N` summed over instances.
    pub spin_updates: u64,
    /// Best energy per instance.
    pub energies: Vec<f64>,
}

/// Runs SA on every instance for each budget `nS = 2^b` split as
/// `n = 2^x`, `S = 2^(b-x)` for the requested `x <= b`.
pub fn sa_hull_sweep(
    instances: &[(&IsingModel, f64)],
    budget_exps: &[u32],
    n_exps: &[u32],
    seed: u64,
) -> Result<Vec<HullCell>> {
    if instances.is_empty() {
        return Err(Error::InvalidArgument("no instances".into()));
    }
    let mut cells = Vec::new();
    for &b in budget_exps {
        for &x in n_exps.iter().filter(|&&x| x <= b) {
            let (n, s) = (1usize << x, 1usize << (b - x));
            let mut r = Vec::with_capacity(instances.len());
            let mut walls = Vec::with_capacity(instances.len());
            let mut energies = Vec::with_capacity(instances.len());
            let mut updates = 0;
            for (i, &(model, e0)) in instances.iter().enumerate() {
                let t0 = Instant::now();
                let res = run_sa(model, &SaRun::new(model, n, s, derive_seed(seed, i as u64)))?;
                walls.push(t0.elapsed().as_secs_f64() * 1e3);
                updates += res.spin_updates;
                r.push(relative_error(e0, res.energy)?);
                energies.push(res.energy);
            }
            let (median_r, ci_low, ci_high) = median_ci(&r).expect("non-empty");
            let (median_wall_ms, _, _) = median_ci(&walls).expect("non-empty");
            cells.push(HullCell {
                n,
                sweeps: s,
                median_r,
                ci_low,
                ci_high,
                median_wall_ms,
                spin_updates: updates,
                energies,
            });
        }
    }
    Ok(cells)
}
