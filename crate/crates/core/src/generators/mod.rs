//! Instance generators: ±J spin glasses, ferromagnets and tile-planted
//! cubic problems with known ground states.

mod tiles;

use rand::Rng;

pub use tiles::{
    cube_edges, enumerate_tile_classes, gen_tile_planted, planting_cubes, solve_tile_distribution, PlantedInstance,
    TileClass, TileDistribution,
};

use crate::error::Result;
use crate::ising::IsingModel;
use crate::lattice::LatticeTopology;
use crate::rng::stream;

/// Couplers i.i.d. uniform on `{-1, +1}`, zero fields.
pub fn gen_pm_j(topology: &LatticeTopology, seed: u64) -> Result<IsingModel> {
    let mut rng = stream(seed, 0);
    let j = (0..topology.graph().num_edges()).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    IsingModel::on_lattice(topology, vec![0.0; topology.num_vertices()], j)
}

/// `J = -1` on every edge, zero fields.
pub fn gen_ferromagnet(topology: &LatticeTopology) -> Result<IsingModel> {
    IsingModel::on_lattice(topology, vec![0.0; topology.num_vertices()], vec![-1.0; topology.graph().num_edges()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{write_instance, InstanceMeta, SpinState};

    #[test]
    fn pm_j_statistics() {
        let t = LatticeTopology::cubic(10).unwrap();
        let m = gen_pm_j(&t, 3).unwrap();
        assert!(m.h().iter().all(|&h| h == 0.0));
        assert!(m.j().iter().all(|&j| j == 1.0 || j == -1.0));
        let mean = m.j().iter().sum::<f64>() / 3000.0;
        assert!(mean.abs() < 3.0 / 3000f64.sqrt());
    }

    #[test]
    fn pm_j_is_deterministic() {
        let t = LatticeTopology::toric_pegasus(3).unwrap();
        let meta = InstanceMeta { ensemble: "pmj".into(), seed: Some(9) };
        let bytes = |seed| {
            let mut out = Vec::new();
            write_instance(&gen_pm_j(&t, seed).unwrap(), &meta, &mut out).unwrap();
            out
        };
        assert_eq!(bytes(9), bytes(9));
        assert_ne!(bytes(9), bytes(10));
    }

    #[test]
    fn ferromagnet_energies() {
        let t = LatticeTopology::cubic(6).unwrap();
        let m = gen_ferromagnet(&t).unwrap();
        let up = SpinState::uniform(216, 1);
        assert_eq!(m.energy(&up).unwrap(), -648.0);
        assert_eq!(m.energy(&SpinState::uniform(216, -1)).unwrap(), -648.0);
        for i in [0, 100, 215] {
            assert_eq!(m.flip_delta(&up, i), 12.0);
        }
    }
}
