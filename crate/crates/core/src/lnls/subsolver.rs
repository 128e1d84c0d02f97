use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::timing::{ClockKind, TimingModel};
use crate::embedding::{footprint, program, readout, HardwareGraph, OriginEmbedding};
use crate::error::{Error, Result};
use crate::ising::Subproblem;
use crate::rng::{derive_seed, stream};
use crate::samplers::{brute_force, run_sa, run_sgd, SaRun};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsolverKind {
    /// Simulated annealing on the subproblem.
    Sa,
    /// Steepest greedy descent on the subproblem.
    Greedy,
    /// Exhaustive search (at most 24 variables).
    BruteForce,
    /// Program onto hardware, anneal the programmed model, read out.
    ProgrammedSa,
    /// Uniformly random hardware samples read out through the embedding.
    ProgrammedRandom,
}

impl SubsolverKind {
    pub fn needs_embedding(self) -> bool {
        matches!(self, SubsolverKind::ProgrammedSa | SubsolverKind::ProgrammedRandom)
    }

    fn default_clock(self) -> ClockKind {
        if self.needs_embedding() {
            ClockKind::Qpu
        } else {
            ClockKind::SpinUpdates
        }
    }
}

impl fmt::Display for SubsolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubsolverKind::Sa => "sa",
            SubsolverKind::Greedy => "greedy",
            SubsolverKind::BruteForce => "brute-force",
            SubsolverKind::ProgrammedSa => "programmed-sa",
            SubsolverKind::ProgrammedRandom => "programmed-random",
        })
    }
}

impl FromStr for SubsolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sa" => SubsolverKind::Sa,
            "greedy" => SubsolverKind::Greedy,
            "brute-force" => SubsolverKind::BruteForce,
            "programmed-sa" => SubsolverKind::ProgrammedSa,
            "programmed-random" => SubsolverKind::ProgrammedRandom,
            _ => return Err(Error::InvalidArgument(format!("unknown subsolver '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsolverSpec {
    pub kind: SubsolverKind,
    /// Sweeps per anneal.
    pub sweeps: usize,
    /// Samples, restarts or hardware reads per call.
    pub reads: usize,
    pub chain_strength: f64,
}

impl SubsolverSpec {
    /// One anneal of `sweeps` sweeps per call.
    pub fn sa(sweeps: usize) -> Self {
        Self { kind: SubsolverKind::Sa, sweeps, reads: 1, chain_strength: 2.0 }
    }

    pub fn of_kind(kind: SubsolverKind) -> Self {
        let reads = if kind.needs_embedding() { 25 } else { 1 };
        Self { kind, sweeps: 198, reads, chain_strength: 2.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reads == 0 {
            return Err(Error::InvalidArgument("reads must be at least 1".into()));
        }
        if matches!(self.kind, SubsolverKind::Sa | SubsolverKind::ProgrammedSa) && self.sweeps == 0 {
            return Err(Error::InvalidArgument("sweeps must be at least 1".into()));
        }
        if !(self.chain_strength > 0.0) {
            return Err(Error::InvalidArgument("chain strength must be positive".into()));
        }
        Ok(())
    }
}

/// Candidate assignments of the subproblem variables plus the simulated
/// time charged for producing them.
#[derive(Debug, Clone)]
pub struct Proposals {
    pub assignments: Vec<Vec<i8>>,
    pub time_ms: f64,
    pub spin_updates: u64,
}

/// Hardware context needed by programmed subsolvers.
#[derive(Debug, Clone, Copy)]
pub struct HardwareContext<'a> {
    pub embedding: &'a OriginEmbedding,
    pub hardware: &'a HardwareGraph,
}

/// `n_r` hardware-width samples with independent uniform ±1 entries.
pub fn random_hardware_samples<R: Rng + ?Sized>(reads: usize, qubits: usize, rng: &mut R) -> Vec<Vec<i8>> {
    (0..reads).map(|_| (0..qubits).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()).collect()
}

pub fn subsolve(
    subproblem: &Subproblem,
    spec: &SubsolverSpec,
    timing: &TimingModel,
    hardware: Option<HardwareContext<'_>>,
    seed: u64,
) -> Result<Proposals> {
    spec.validate()?;
    let model = subproblem.model();
    let n = model.num_vertices() as u64;
    let (assignments, spin_updates) = match spec.kind {
        SubsolverKind::Sa => {
            let r = run_sa(model, &SaRun::new(model, spec.reads, spec.sweeps, seed))?;
            (vec![r.state.into_vec()], r.spin_updates)
        }
        SubsolverKind::Greedy => {
            let r = run_sgd(model, spec.reads, seed)?;
            // initial field evaluation plus one scan per flip
            (vec![r.state.into_vec()], n * (spec.reads as u64 + r.flips))
        }
        SubsolverKind::BruteForce => {
            let (x, _) = brute_force(model)?;
            (vec![x.into_vec()], 1u64 << n)
        }
        SubsolverKind::ProgrammedSa | SubsolverKind::ProgrammedRandom => {
            let ctx = hardware
                .ok_or_else(|| Error::InvalidArgument(format!("subsolver {} needs an embedding", spec.kind)))?;
            let programmed = program(subproblem, ctx.embedding, ctx.hardware, spec.chain_strength)?;
            let width = programmed.qubits.len();
            if spec.kind == SubsolverKind::ProgrammedRandom {
                let samples = random_hardware_samples(spec.reads, width, &mut stream(seed, 0));
                (readout(&samples, ctx.embedding, ctx.hardware)?, 0)
            } else {
                let fp = footprint(ctx.embedding);
                let (fm, map) = programmed.footprint_model(ctx.hardware, &fp)?;
                let mut samples = Vec::with_capacity(spec.reads);
                let mut updates = 0;
                for read in 0..spec.reads {
                    let r = run_sa(&fm, &SaRun::new(&fm, 1, spec.sweeps, derive_seed(seed, read as u64)))?;
                    updates += r.spin_updates;
                    let mut s = vec![1i8; width];
                    for (i, &p) in map.iter().enumerate() {
                        s[p] = r.state[i];
                    }
                    samples.push(s);
                }
                (readout(&samples, ctx.embedding, ctx.hardware)?, updates)
            }
        }
    };
    let time_ms = timing.charge(spec.kind.default_clock(), spec.reads, spin_updates);
    Ok(Proposals { assignments, time_ms, spin_updates })
}
