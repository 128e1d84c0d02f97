use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;

use super::subsolver::{subsolve, HardwareContext, SubsolverSpec};
use super::timing::TimingModel;
use crate::embedding::{HardwareGraph, OriginEmbedding};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ising::{
    apply_proposal, build_subproblem_on, build_subproblem_planned, induced_graph, IsingModel, SpinState, SubproblemPlan,
};
use crate::lattice::{LatticeTopology, Offset, SubspaceShape};
use crate::rng::{derive_seed, stream};
use crate::samplers::descend;

const INIT_STREAM: u64 = 1;
const SELECT_STREAM: u64 = 2;
const SUBSOLVER_STREAM: u64 = 3;

/// A region placed at the origin. Lattice templates are displaced by a
/// uniformly chosen lattice offset each iteration; explicit templates are
/// used as given.
#[derive(Debug, Clone)]
pub struct RegionTemplate {
    label: String,
    members: Vec<u32>,
    local_graph: Arc<Graph>,
    offsets: Vec<Offset>,
    topology: Option<LatticeTopology>,
    plan: Option<Arc<SubproblemPlan>>,
    hardware: Option<(Arc<OriginEmbedding>, Arc<HardwareGraph>)>,
}

impl RegionTemplate {
    pub fn from_shape(topology: &LatticeTopology, shape: &SubspaceShape) -> Result<Self> {
        let members = shape.origin_members(topology)?;
        Self::lattice(topology, shape.to_string(), members, None)
    }

    /// Active variables of a defect-trimmed embedding.
    pub fn from_embedding(
        topology: &LatticeTopology,
        embedding: Arc<OriginEmbedding>,
        hardware: Arc<HardwareGraph>,
    ) -> Result<Self> {
        let members = embedding.lattice_members(topology)?;
        let label = embedding.shape().to_string();
        Self::lattice(topology, label, members, Some((embedding, hardware)))
    }

    /// A fixed region of an arbitrary model.
    pub fn explicit(graph: &Graph, members: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; graph.num_vertices()];
        for &m in &members {
            match seen.get_mut(m as usize) {
                Some(s) if !*s => *s = true,
                _ => return Err(Error::InvalidArgument(format!("bad or repeated region member {m}"))),
            }
        }
        Ok(Self {
            label: format!("explicit{}", members.len()),
            local_graph: Arc::new(induced_graph(graph, &members)),
            members,
            offsets: Vec::new(),
            topology: None,
            plan: None,
            hardware: None,
        })
    }

    fn lattice(
        topology: &LatticeTopology,
        label: String,
        members: Vec<u32>,
        hardware: Option<(Arc<OriginEmbedding>, Arc<HardwareGraph>)>,
    ) -> Result<Self> {
        let local_graph = Arc::new(induced_graph(topology.graph(), &members));
        let plan = SubproblemPlan::new(topology, &members, Arc::clone(&local_graph))?;
        Ok(Self {
            label,
            local_graph,
            members,
            offsets: topology.offsets(),
            topology: Some(topology.clone()),
            plan: Some(Arc::new(plan)),
            hardware,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn num_offsets(&self) -> usize {
        self.offsets.len().max(1)
    }

    /// Members of placement `offset_index`.
    pub fn placement(&self, offset_index: usize) -> Vec<u32> {
        match &self.topology {
            Some(t) => {
                let off = &self.offsets[offset_index];
                self.members.iter().map(|&v| t.displace(v as usize, off) as u32).collect()
            }
            None => self.members.clone(),
        }
    }

    fn offset(&self, index: usize) -> Option<Offset> {
        self.offsets.get(index).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    #[default]
    Default,
    /// Steepest descent on the subproblem applied to the chosen proposal.
    PostProcess,
    /// Steepest descent on the full state after each proposal, charged no
    /// simulated time.
    ParallelProcess,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Default => "default",
            Variant::PostProcess => "post-process",
            Variant::ParallelProcess => "parallel-process",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "default" => Variant::Default,
            "post-process" => Variant::PostProcess,
            "parallel-process" => Variant::ParallelProcess,
            _ => return Err(Error::InvalidArgument(format!("unknown workflow variant '{s}'"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct LnlsConfig {
    pub regions: Vec<RegionTemplate>,
    pub e_target: f64,
    pub max_iterations: usize,
    pub subsolver: SubsolverSpec,
    pub timing: TimingModel,
    pub variant: Variant,
    pub seed: u64,
    /// Starting state; uniformly random when absent.
    pub initial_state: Option<SpinState>,
}

impl LnlsConfig {
    pub fn new(regions: Vec<RegionTemplate>, subsolver: SubsolverSpec, seed: u64) -> Self {
        Self {
            regions,
            e_target: f64::NEG_INFINITY,
            max_iterations: 128,
            subsolver,
            timing: TimingModel::default(),
            variant: Variant::Default,
            seed,
            initial_state: None,
        }
    }

    fn validate(&self, model: &IsingModel) -> Result<()> {
        if self.regions.is_empty() {
            return Err(Error::InvalidArgument("at least one region template is required".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if self.e_target.is_nan() {
            return Err(Error::InvalidArgument("E_target must not be NaN".into()));
        }
        self.subsolver.validate()?;
        self.timing.validate()?;
        for r in &self.regions {
            if r.local_graph.num_vertices() != r.members.len()
                || r.members.iter().any(|&m| m as usize >= model.num_vertices())
            {
                return Err(Error::InvalidArgument(format!("region {} does not fit the model", r.label)));
            }
            if let Some(t) = &r.topology {
                if t.num_vertices() != model.num_vertices() {
                    return Err(Error::InvalidArgument(format!("region {} belongs to another lattice", r.label)));
                }
            }
            if self.subsolver.kind.needs_embedding() && r.hardware.is_none() {
                return Err(Error::InvalidArgument(format!(
                    "subsolver {} needs embedded regions; {} has no embedding",
                    self.subsolver.kind, r.label
                )));
            }
        }
        if let Some(x) = &self.initial_state {
            if x.len() != model.num_vertices() {
                return Err(Error::Dimension { expected: model.num_vertices(), got: x.len() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BurnDownPoint {
    pub iteration: usize,
    pub energy: f64,
    pub accepted: bool,
    /// Simulated clock after this iteration, ms.
    pub sim_time_ms: f64,
    /// Elapsed real time, ms.
    pub wall_time_ms: f64,
    /// Real time spent inside subsolver calls so far, ms.
    pub subsolver_wall_ms: f64,
    pub region: Option<usize>,
    pub offset: Option<usize>,
}

/// Energy trace of one run; point 0 is the initial state at clock 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BurnDownRecord {
    pub points: Vec<BurnDownPoint>,
}

impl BurnDownRecord {
    pub fn final_energy(&self) -> f64 {
        self.points.last().map_or(f64::NAN, |p| p.energy)
    }

    pub fn iterations(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    /// First iteration at which the energy is at or below `target`.
    pub fn iterations_to(&self, target: f64) -> Option<usize> {
        self.points.iter().find(|p| p.energy <= target).map(|p| p.iteration)
    }

    /// Mean real time per iteration outside subsolver calls, ms.
    pub fn driver_overhead_ms(&self) -> f64 {
        match self.points.last() {
            Some(p) if p.iteration > 0 => (p.wall_time_ms - p.subsolver_wall_ms) / p.iteration as f64,
            _ => 0.0,
        }
    }
}

/// Greedy large-neighbourhood local search.
///
/// Each iteration picks a region template and an offset uniformly at random,
/// conditions the subproblem on the current state, asks the subsolver for
/// proposals and applies the best one only if it strictly lowers the energy.
/// Stops once the energy reaches `e_target` or after `max_iterations`.
pub fn run_lnls(model: &IsingModel, config: &LnlsConfig) -> Result<(SpinState, BurnDownRecord)> {
    config.validate(model)?;
    let start = Instant::now();
    let mut state = match &config.initial_state {
        Some(x) => x.clone(),
        None => SpinState::random(model.num_vertices(), &mut stream(derive_seed(config.seed, INIT_STREAM), 0)),
    };
    let mut select = stream(derive_seed(config.seed, SELECT_STREAM), 0);
    let solver_seed = derive_seed(config.seed, SUBSOLVER_STREAM);
    let mut energy = model.energy(&state)?;
    let mut record = BurnDownRecord::default();
    record.points.push(BurnDownPoint {
        iteration: 0,
        energy,
        accepted: false,
        sim_time_ms: 0.0,
        wall_time_ms: 0.0,
        subsolver_wall_ms: 0.0,
        region: None,
        offset: None,
    });
    let mut clock = 0.0;
    let mut solver_wall = 0.0;
    for iteration in 1..=config.max_iterations {
        if energy <= config.e_target {
            break;
        }
        let r = select.random_range(0..config.regions.len());
        let region = &config.regions[r];
        let o = select.random_range(0..region.num_offsets());
        let members = region.placement(o);
        let sub = match &region.plan {
            Some(plan) if plan.fits(model) => build_subproblem_planned(model, &state, &members, plan)?,
            _ => build_subproblem_on(model, &state, &members, Arc::clone(&region.local_graph))?,
        };
        let ctx =
            region.hardware.as_ref().map(|(e, h)| HardwareContext { embedding: e.as_ref(), hardware: h.as_ref() });
        let t0 = Instant::now();
        let proposals =
            subsolve(&sub, &config.subsolver, &config.timing, ctx, derive_seed(solver_seed, iteration as u64))?;
        solver_wall += t0.elapsed().as_secs_f64() * 1e3;
        if !(proposals.time_ms > 0.0) {
            return Err(Error::InvalidArgument("timing model charged no time for a subsolver call".into()));
        }
        clock += proposals.time_ms;

        let mut best: Option<(f64, Vec<i8>)> = None;
        for y in proposals.assignments {
            let e = sub.energy(&y)?;
            if best.as_ref().is_none_or(|(b, _)| e < *b) {
                best = Some((e, y));
            }
        }
        let (mut best_e, best_y) =
            best.ok_or_else(|| Error::InvalidArgument("subsolver returned no proposals".into()))?;
        let mut best_y = SpinState::new(best_y)?;
        if config.variant == Variant::PostProcess {
            best_e += descend(sub.model(), &mut best_y).0;
        }
        let current_e = sub.energy(sub.current())?;
        let tol = 1e-9 * (1.0 + current_e.abs());
        let mut accepted = false;
        if best_e < current_e - tol {
            let delta = apply_proposal(model, &mut state, &members, &best_y)?;
            energy += delta;
            accepted = true;
        }
        if config.variant == Variant::ParallelProcess {
            let (delta, flips) = descend(model, &mut state);
            energy += delta;
            accepted |= flips > 0;
        }
        record.points.push(BurnDownPoint {
            iteration,
            energy,
            accepted,
            sim_time_ms: clock,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
            subsolver_wall_ms: solver_wall,
            region: Some(r),
            offset: region.offset(o).map(|_| o),
        });
    }
    Ok((state, record))
}

/// [`run_lnls`] under the configured workflow variant.
pub fn run_workflow_variant(model: &IsingModel, config: &LnlsConfig) -> Result<(SpinState, BurnDownRecord)> {
    run_lnls(model, config)
}
