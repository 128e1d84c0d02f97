use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinState};

pub const MAX_BRUTE_FORCE_VARIABLES: usize = 24;

/// Exact minimum by Gray-code enumeration of all `2^N` states. Among
/// minimisers the lexicographically smallest state wins, ordering `-1`
/// before `+1` and comparing vertex 0 first.
pub fn brute_force(model: &IsingModel) -> Result<(SpinState, f64)> {
    let n = model.num_vertices();
    if n > MAX_BRUTE_FORCE_VARIABLES {
        return Err(Error::InvalidArgument(format!(
            "brute force limited to {MAX_BRUTE_FORCE_VARIABLES} variables (got {n})"
        )));
    }
    let (offsets, neighbors, couplers) = model.csr();
    let mut x = vec![-1i8; n];
    let mut f = model.local_fields(&x);
    let mut e = model.energy_unchecked(&x);
    // state code: bit n-1-v set when vertex v is +1
    let (mut best_e, mut best_code) = (e, 0u64);
    let scale = 1.0 + model.h().iter().chain(model.j()).map(|v| v.abs()).sum::<f64>();
    let tol = 1e-12 * scale;
    let mut code = 0u64;
    for step in 1u64..1 << n {
        let bit = step.trailing_zeros() as usize;
        let v = n - 1 - bit;
        let s = f64::from(x[v]);
        e += -2.0 * s * f[v];
        x[v] = -x[v];
        code ^= 1 << bit;
        for k in offsets[v] as usize..offsets[v + 1] as usize {
            f[neighbors[k] as usize] -= 2.0 * s * couplers[k];
        }
        if e < best_e - tol || (e <= best_e + tol && code < best_code) {
            best_e = e;
            best_code = code;
        }
    }
    let spins: Vec<i8> = (0..n).map(|v| if best_code >> (n - 1 - v) & 1 == 1 { 1 } else { -1 }).collect();
    // report the exactly recomputed energy of the winner
    let energy = model.energy_unchecked(&spins);
    Ok((SpinState::new(spins)?, energy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn tiny_models() {
        let m = IsingModel::from_terms(1, &[], vec![2.0]).unwrap();
        let (x, e) = brute_force(&m).unwrap();
        assert_eq!((x.to_vec(), e), (vec![-1], -2.0));

        let m = IsingModel::from_terms(2, &[(0, 1, 1.0)], vec![0.0, 0.0]).unwrap();
        let (x, e) = brute_force(&m).unwrap();
        assert_eq!((x.to_vec(), e), (vec![-1, 1], -1.0));
    }

    #[test]
    fn matches_naive_enumeration() {
        let mut rng = stream(2, 0);
        for _ in 0..5 {
            let n = 9;
            let mut terms = Vec::new();
            for a in 0..n as u32 {
                for b in a + 1..n as u32 {
                    if rng.random::<f64>() < 0.4 {
                        terms.push((a, b, f64::from(rng.random_range(-2..=2))));
                    }
                }
            }
            let h = (0..n).map(|_| f64::from(rng.random_range(-1..=1))).collect();
            let m = IsingModel::from_terms(n, &terms, h).unwrap();
            let mut best: Option<(f64, Vec<i8>)> = None;
            for code in 0u32..1 << n {
                let x: Vec<i8> = (0..n).map(|v| if code >> (n - 1 - v) & 1 == 1 { 1 } else { -1 }).collect();
                let e = m.energy(&x).unwrap();
                if best.as_ref().is_none_or(|(b, _)| e < *b) {
                    best = Some((e, x));
                }
            }
            let (e, x) = best.unwrap();
            let (bx, be) = brute_force(&m).unwrap();
            assert_eq!((bx.to_vec(), be), (x, e));
        }
    }

    #[test]
    fn rejects_large_models() {
        let m = IsingModel::from_terms(25, &[], vec![0.0; 25]).unwrap();
        assert!(brute_force(&m).is_err());
    }
}
