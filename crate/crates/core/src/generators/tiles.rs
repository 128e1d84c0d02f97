//! Tile planting on even-sized cubic lattices.
//!
//! The lattice edges split into `L³/4` disjoint 2×2×2 cubes whose lower
//! corners satisfy `i1 ≡ i2 ≡ i3 (mod 2)`. Each cube receives a tile: a set of
//! frustrated edges relative to the planted state for which the planted state
//! is still a tile ground state. Since the tiles partition the couplers, the
//! planted state is a global ground state with energy `Σ e_tile`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::error::{Error, Result};
use crate::ising::{IsingModel, PlantedSolution, SpinState};
use crate::lattice::{Coord, CubicCoord, LatticeKind, LatticeTopology};
use crate::rng::stream;

/// Each spin lies in two tiles of eight spins, so `N` spins carry `N/4`
/// tiles.
const SPINS_PER_TILE: f64 = 4.0;

/// The twelve edges of the unit cube; corner `c` has offset bits
/// `(c >> 2 & 1, c >> 1 & 1, c & 1)`.
pub fn cube_edges() -> [(u8, u8); 12] {
    let mut out = [(0, 0); 12];
    let mut n = 0;
    for a in 0..8u8 {
        for bit in [4u8, 2, 1] {
            if a & bit == 0 {
                out[n] = (a, a | bit);
                n += 1;
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileClass {
    /// Indices into [`cube_edges`] carrying a frustrated coupler.
    pub frustrated: Vec<u8>,
    /// Tile energy at the planted state, `-12 + 2·|frustrated|`.
    pub energy: i32,
}

fn tile_energy(frustrated: &[u8], spins: u8) -> i32 {
    let s = |c: u8| if spins >> c & 1 == 1 { 1 } else { -1 };
    cube_edges()
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let j = if frustrated.contains(&(i as u8)) { 1 } else { -1 };
            j * s(a) * s(b)
        })
        .sum()
}

/// All frustrated-edge subsets of size at most three for which the all-up
/// tile state is a ground state, checked over all 2⁸ tile states. Ordered
/// by size, then lexicographically.
pub fn enumerate_tile_classes() -> Vec<TileClass> {
    let mut subsets: Vec<Vec<u8>> = (0u16..1 << 12)
        .filter(|m| m.count_ones() <= 3)
        .map(|m| (0..12u8).filter(|&i| m >> i & 1 == 1).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
        .into_iter()
        .filter_map(|frustrated| {
            let planted = tile_energy(&frustrated, 0xff);
            (0..=255u8)
                .all(|s| tile_energy(&frustrated, s) >= planted)
                .then_some(TileClass { frustrated, energy: planted })
        })
        .collect()
}

/// Maximum-entropy distribution over tile classes with a prescribed mean
/// ground-state energy per spin.
#[derive(Debug, Clone)]
pub struct TileDistribution {
    pub classes: Vec<TileClass>,
    pub probabilities: Vec<f64>,
    /// `P(i) ∝ exp(-λ e_i)`; infinite at the boundary of the feasible range.
    pub lambda: f64,
}

impl TileDistribution {
    /// `Σ e_i P(i) / 4`: tiles number `N/4`, so this is the expected
    /// ground-state energy per spin.
    pub fn energy_per_spin(&self) -> f64 {
        self.mean_tile_energy() / SPINS_PER_TILE
    }

    pub fn mean_tile_energy(&self) -> f64 {
        self.classes.iter().zip(&self.probabilities).map(|(c, p)| f64::from(c.energy) * p).sum()
    }

    /// Total probability of classes with tile energy `e`.
    pub fn mass_at_energy(&self, e: i32) -> f64 {
        self.classes.iter().zip(&self.probabilities).filter(|(c, _)| c.energy == e).map(|(_, p)| p).sum()
    }

    /// All mass on classes with energy `e`, uniformly.
    pub fn degenerate(classes: Vec<TileClass>, e: i32) -> Result<Self> {
        let count = classes.iter().filter(|c| c.energy == e).count();
        if count == 0 {
            return Err(Error::InvalidArgument(format!("no tile class has energy {e}")));
        }
        let probabilities = classes.iter().map(|c| if c.energy == e { 1.0 / count as f64 } else { 0.0 }).collect();
        Ok(Self { classes, probabilities, lambda: f64::NAN })
    }
}

fn gibbs(classes: &[TileClass], lambda: f64) -> Vec<f64> {
    // log-sum-exp shift for stability at large |λ|
    let logits: Vec<f64> = classes.iter().map(|c| -lambda * f64::from(c.energy)).collect();
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

fn mean_energy(classes: &[TileClass], lambda: f64) -> f64 {
    gibbs(classes, lambda).iter().zip(classes).map(|(p, c)| p * f64::from(c.energy)).sum()
}

/// Solves for `λ` by bisection so that the expected ground-state energy per
/// spin equals `target`. The mean tile energy decreases monotonically in
/// `λ`.
pub fn solve_tile_distribution(target: f64) -> Result<TileDistribution> {
    let classes = enumerate_tile_classes();
    let emin = classes.iter().map(|c| c.energy).min().expect("classes");
    let emax = classes.iter().map(|c| c.energy).max().expect("classes");
    let (lo, hi) = (f64::from(emin) / SPINS_PER_TILE, f64::from(emax) / SPINS_PER_TILE);
    if !(lo..=hi).contains(&target) {
        return Err(Error::TargetOutOfRange { target, min: lo, max: hi });
    }
    if target == lo {
        let mut d = TileDistribution::degenerate(classes, emin)?;
        d.lambda = f64::INFINITY;
        return Ok(d);
    }
    if target == hi {
        let mut d = TileDistribution::degenerate(classes, emax)?;
        d.lambda = f64::NEG_INFINITY;
        return Ok(d);
    }
    let goal = target * SPINS_PER_TILE;
    let (mut a, mut b) = (-10.0f64, 10.0f64);
    while mean_energy(&classes, a) < goal && a > -1e6 {
        a *= 2.0;
    }
    while mean_energy(&classes, b) > goal && b < 1e6 {
        b *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mean_energy(&classes, mid) > goal {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-12 {
            break;
        }
    }
    let lambda = 0.5 * (a + b);
    let probabilities = gibbs(&classes, lambda);
    Ok(TileDistribution { classes, probabilities, lambda })
}

/// Lower corners of the planting cubes: `i1 ≡ i2 ≡ i3 (mod 2)`.
pub fn planting_cubes(l: usize) -> Vec<CubicCoord> {
    let mut out = Vec::with_capacity(l * l * l / 4);
    for i1 in 0..l as u32 {
        for i2 in 0..l as u32 {
            for i3 in 0..l as u32 {
                if i1 % 2 == i2 % 2 && i2 % 2 == i3 % 2 {
                    out.push(CubicCoord::new(i1, i2, i3));
                }
            }
        }
    }
    out
}

/// Lattice edge indices of the cube at `corner`, in [`cube_edges`] order.
pub(crate) fn cube_lattice_edges(topology: &LatticeTopology, corner: CubicCoord) -> [usize; 12] {
    let l = topology.scale() as u32;
    let vertex = |c: u8| {
        let d = |bit: u8| u32::from(c & bit != 0);
        let cc = CubicCoord::new((corner.i1 + d(4)) % l, (corner.i2 + d(2)) % l, (corner.i3 + d(1)) % l);
        topology.id_of(&Coord::Cubic(cc)).expect("in range")
    };
    let mut out = [0; 12];
    for (i, &(a, b)) in cube_edges().iter().enumerate() {
        out[i] = topology.graph().find_edge(vertex(a), vertex(b)).expect("cube edge on lattice");
    }
    out
}

#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub model: IsingModel,
    pub planted: PlantedSolution,
    /// Chosen class index per planting cube, in [`planting_cubes`] order.
    pub tiles: Vec<usize>,
}

/// Tile-planted instance on the periodic `L×L×L` lattice (`L` even, at
/// least 4). The planted state is a uniformly random gauge of all-up.
pub fn gen_tile_planted(l: usize, distribution: &TileDistribution, seed: u64) -> Result<PlantedInstance> {
    if l % 2 != 0 {
        return Err(Error::Lattice(format!("tile planting needs even L (got {l})")));
    }
    let topology = LatticeTopology::build(LatticeKind::Cubic, l)?;
    let mut rng = stream(seed, 0);
    let picker = WeightedIndex::new(&distribution.probabilities)
        .map_err(|e| Error::InvalidArgument(format!("bad tile distribution: {e}")))?;
    let mut j = vec![f64::NAN; topology.graph().num_edges()];
    let mut tiles = Vec::new();
    let mut ground = 0i64;
    for corner in planting_cubes(l) {
        let class = picker.sample(&mut rng);
        let tile = &distribution.classes[class];
        for (i, e) in cube_lattice_edges(&topology, corner).into_iter().enumerate() {
            j[e] = if tile.frustrated.contains(&(i as u8)) { 1.0 } else { -1.0 };
        }
        ground += i64::from(tile.energy);
        tiles.push(class);
    }
    debug_assert!(j.iter().all(|v| !v.is_nan()));
    let state = SpinState::random(topology.num_vertices(), &mut rng);
    for (v, &(a, b)) in j.iter_mut().zip(topology.graph().edges()) {
        *v *= f64::from(state[a as usize] * state[b as usize]);
    }
    let model = IsingModel::on_lattice(&topology, vec![0.0; topology.num_vertices()], j)?;
    Ok(PlantedInstance { model, planted: PlantedSolution { state, ground_energy: ground as f64 }, tiles })
}
