use std::time::Instant;

use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinState};
use crate::lnls::{BurnDownPoint, BurnDownRecord};
use crate::rng::stream;
use crate::samplers::descend;

/// Clock for a restart-based baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineClock {
    Wall,
    /// Work units (one per variable per scan) times a fixed rate.
    SpinUpdates {
        ns_per_update: f64,
    },
}

/// Steepest-descent restarts until `budget_ms` has elapsed on `clock`.
/// Point `r` holds the best energy after `r` restarts; point 0 is the first
/// random start.
pub fn sgd_burn_down(
    model: &IsingModel,
    budget_ms: f64,
    clock: BaselineClock,
    seed: u64,
    max_restarts: usize,
) -> Result<BurnDownRecord> {
    if !(budget_ms >= 0.0) || max_restarts == 0 {
        return Err(Error::InvalidArgument("baseline needs a non-negative budget and at least one restart".into()));
    }
    let n = model.num_vertices() as f64;
    let start = Instant::now();
    let mut modeled = 0.0;
    let mut best = f64::INFINITY;
    let mut points = Vec::new();
    for r in 0..max_restarts {
        let mut x = SpinState::random(model.num_vertices(), &mut stream(seed, r as u64));
        if r == 0 {
            let e = model.energy(&x)?;
            points.push(point(0, e, 0.0, 0.0));
        }
        let (_, flips) = descend(model, &mut x);
        best = best.min(model.energy(&x)?);
        let wall = start.elapsed().as_secs_f64() * 1e3;
        let now = match clock {
            BaselineClock::Wall => wall,
            BaselineClock::SpinUpdates { ns_per_update } => {
                modeled += n * (1 + flips) as f64 * ns_per_update * 1e-6;
                modeled
            }
        };
        points.push(point(r + 1, best, now, wall));
        if now >= budget_ms {
            break;
        }
    }
    Ok(BurnDownRecord { points })
}

fn point(iteration: usize, energy: f64, sim: f64, wall: f64) -> BurnDownPoint {
    BurnDownPoint {
        iteration,
        energy,
        accepted: iteration > 0,
        sim_time_ms: sim,
        wall_time_ms: wall,
        subsolver_wall_ms: wall,
        region: None,
        offset: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_pm_j;
    use crate::lattice::LatticeTopology;
    use crate::samplers::run_sgd;

    #[test]
    fn best_so_far_matches_run_sgd() {
        let t = LatticeTopology::cubic(5).unwrap();
        let m = gen_pm_j(&t, 1).unwrap();
        let clock = BaselineClock::SpinUpdates { ns_per_update: 33.0 };
        let rec = sgd_burn_down(&m, f64::INFINITY, clock, 9, 10).unwrap();
        assert_eq!(rec.points.len(), 11);
        assert_eq!(rec.final_energy(), run_sgd(&m, 10, 9).unwrap().energy);
        for w in rec.points.windows(2) {
            assert!(w[1].energy <= w[0].energy && w[1].sim_time_ms > w[0].sim_time_ms);
        }
        let short = sgd_burn_down(&m, 0.0, clock, 9, 10).unwrap();
        assert_eq!(short.points.len(), 2);
    }
}
