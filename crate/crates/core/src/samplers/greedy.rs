use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinState};
use crate::rng::stream;

#[derive(Debug, Clone)]
pub struct SgdResult {
    pub state: SpinState,
    pub energy: f64,
    /// Single-spin flips performed across all restarts.
    pub flips: u64,
}

/// Steepest descent by single flips from `state`: repeatedly flip the spin
/// with the most negative energy change (lowest id on ties) until none
/// lowers the energy. Returns the energy change and the flip count.
pub fn descend(model: &IsingModel, state: &mut SpinState) -> (f64, u64) {
    let (offsets, neighbors, couplers) = model.csr();
    let x = state.as_mut_slice();
    let mut delta: Vec<f64> = (0..x.len()).map(|i| -2.0 * f64::from(x[i]) * model.local_field(x, i)).collect();
    let mut total = 0.0;
    let mut flips = 0;
    loop {
        let mut best = 0.0;
        let mut arg = usize::MAX;
        for (i, &d) in delta.iter().enumerate() {
            if d < best {
                best = d;
                arg = i;
            }
        }
        if arg == usize::MAX {
            return (total, flips);
        }
        let i = arg;
        let old = f64::from(x[i]);
        x[i] = -x[i];
        total += best;
        flips += 1;
        delta[i] = -best;
        for k in offsets[i] as usize..offsets[i + 1] as usize {
            let n = neighbors[k] as usize;
            // f_n moves by -2 J old; delta_n = -2 x_n f_n
            delta[n] += 4.0 * f64::from(x[n]) * couplers[k] * old;
        }
    }
}

/// Best of `restarts` steepest descents from independent random starts.
pub fn run_sgd(model: &IsingModel, restarts: usize, seed: u64) -> Result<SgdResult> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("restart count must be at least 1".into()));
    }
    let mut best: Option<(f64, SpinState)> = None;
    let mut flips = 0;
    for r in 0..restarts {
        let mut x = SpinState::random(model.num_vertices(), &mut stream(seed, r as u64));
        flips += descend(model, &mut x).1;
        let e = model.energy_unchecked(&x);
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, x));
        }
    }
    let (energy, state) = best.expect("at least one restart");
    Ok(SgdResult { state, energy, flips })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_ferromagnet, gen_pm_j};
    use crate::lattice::LatticeTopology;

    #[test]
    fn single_variable_flips_down() {
        let m = IsingModel::from_terms(1, &[], vec![1.0]).unwrap();
        let mut x = SpinState::uniform(1, 1);
        assert_eq!(descend(&m, &mut x).0, -2.0);
        assert_eq!(m.energy(&x).unwrap(), -1.0);
    }

    #[test]
    fn ground_state_is_fixed_point() {
        let m = gen_ferromagnet(&LatticeTopology::cubic(4).unwrap()).unwrap();
        let mut x = SpinState::uniform(64, 1);
        assert_eq!(descend(&m, &mut x), (0.0, 0));
        assert_eq!(m.energy(&x).unwrap(), -192.0);
    }

    #[test]
    fn outputs_are_local_minima() {
        let m = gen_pm_j(&LatticeTopology::cubic(6).unwrap(), 3).unwrap();
        let r = run_sgd(&m, 4, 1).unwrap();
        assert!(m.is_local_minimum(&r.state));
        assert_eq!(m.energy(&r.state).unwrap(), r.energy);
    }

    #[test]
    fn follows_steepest_then_lowest_id() {
        // vertex 2 has the largest gain; vertices 0 and 1 tie afterwards
        let m = IsingModel::from_terms(3, &[], vec![1.0, 1.0, 3.0]).unwrap();
        let mut x = SpinState::uniform(3, 1);
        let mut trace = Vec::new();
        while let Some(i) = (0..3)
            .filter(|&i| m.flip_delta(&x, i) < 0.0)
            .min_by(|&a, &b| m.flip_delta(&x, a).total_cmp(&m.flip_delta(&x, b)).then(a.cmp(&b)))
        {
            trace.push(i);
            x.flip(i);
        }
        assert_eq!(trace, vec![2, 0, 1]);
        let mut y = SpinState::uniform(3, 1);
        assert_eq!(descend(&m, &mut y).1, 3);
        assert_eq!(x, y);
    }
}
