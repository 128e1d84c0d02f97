//! Ising models `H(x) = Σ J_ij x_i x_j + Σ h_i x_i`, spin states and
//! conditioned subproblems.

mod io;

use std::ops::Deref;
use std::sync::Arc;

use rand::Rng;

pub use io::{read_instance, read_planted, write_instance, write_planted, InstanceMeta, PlantedSolution};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lattice::{LatticeKind, LatticeTopology, SubspaceSelection};

/// Couplers and fields over a graph, optionally tied to a lattice.
#[derive(Debug, Clone)]
pub struct IsingModel {
    graph: Arc<Graph>,
    topology: Option<LatticeTopology>,
    h: Vec<f64>,
    j: Vec<f64>,
    // couplers in adjacency order, parallel to the graph's neighbour lists
    adj_j: Vec<f64>,
}

impl IsingModel {
    /// Model over an arbitrary graph; `j` follows the graph's edge order.
    pub fn new(graph: Arc<Graph>, h: Vec<f64>, j: Vec<f64>) -> Result<Self> {
        Self::assemble(graph, None, h, j)
    }

    pub fn on_lattice(topology: &LatticeTopology, h: Vec<f64>, j: Vec<f64>) -> Result<Self> {
        Self::assemble(topology.graph_arc(), Some(topology.clone()), h, j)
    }

    /// Model from explicit `(a, b, J)` terms; unspecified fields are zero.
    pub fn from_terms(num_vertices: usize, terms: &[(u32, u32, f64)], h: Vec<f64>) -> Result<Self> {
        let graph = Graph::new(num_vertices, terms.iter().map(|&(a, b, _)| (a, b)))?;
        let mut j = vec![0.0; graph.num_edges()];
        for &(a, b, v) in terms {
            j[graph.find_edge(a as usize, b as usize).expect("edge just inserted")] = v;
        }
        Self::new(Arc::new(graph), h, j)
    }

    fn assemble(graph: Arc<Graph>, topology: Option<LatticeTopology>, h: Vec<f64>, j: Vec<f64>) -> Result<Self> {
        if h.len() != graph.num_vertices() {
            return Err(Error::Dimension { expected: graph.num_vertices(), got: h.len() });
        }
        if j.len() != graph.num_edges() {
            return Err(Error::Dimension { expected: graph.num_edges(), got: j.len() });
        }
        if let Some(bad) = h.iter().chain(&j).find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite coefficient {bad}")));
        }
        let adj_j = graph.flat_edges().iter().map(|&e| j[e as usize]).collect();
        Ok(Self { graph, topology, h, j, adj_j })
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn graph_arc(&self) -> Arc<Graph> {
        Arc::clone(&self.graph)
    }

    pub fn topology(&self) -> Option<&LatticeTopology> {
        self.topology.as_ref()
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// Couplers in edge order.
    pub fn j(&self) -> &[f64] {
        &self.j
    }

    /// Lattice connectivity when attached to a lattice, otherwise the
    /// maximum degree.
    pub fn connectivity(&self) -> usize {
        self.topology.as_ref().map_or_else(|| self.graph.max_degree(), |t| t.connectivity())
    }

    /// `(neighbour, J)` pairs of vertex `i`.
    pub fn couplings(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let o = self.graph.offsets();
        let range = o[i] as usize..o[i + 1] as usize;
        self.graph.flat_neighbors()[range.clone()].iter().zip(&self.adj_j[range]).map(|(&n, &j)| (n as usize, j))
    }

    /// Raw adjacency: offsets, neighbours and couplers in adjacency order.
    pub fn csr(&self) -> (&[u32], &[u32], &[f64]) {
        (self.graph.offsets(), self.graph.flat_neighbors(), &self.adj_j)
    }

    pub fn max_abs_j(&self) -> f64 {
        self.j.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.num_vertices() {
            return Err(Error::Dimension { expected: self.num_vertices(), got: len });
        }
        Ok(())
    }

    /// `H(x)`, each edge counted once.
    pub fn energy(&self, x: &[i8]) -> Result<f64> {
        self.check_len(x.len())?;
        Ok(self.energy_unchecked(x))
    }

    pub(crate) fn energy_unchecked(&self, x: &[i8]) -> f64 {
        let mut e = 0.0;
        for (&(a, b), &j) in self.graph.edges().iter().zip(&self.j) {
            e += j * f64::from(x[a as usize] * x[b as usize]);
        }
        for (&h, &s) in self.h.iter().zip(x) {
            e += h * f64::from(s);
        }
        e
    }

    /// `f_i = h_i + Σ_j J_ij x_j`. Flipping `x_i` changes `H` by `-2 x_i f_i`.
    pub fn local_field(&self, x: &[i8], i: usize) -> f64 {
        self.h[i] + self.couplings(i).map(|(n, j)| j * f64::from(x[n])).sum::<f64>()
    }

    pub fn local_fields(&self, x: &[i8]) -> Vec<f64> {
        (0..self.num_vertices()).map(|i| self.local_field(x, i)).collect()
    }

    /// Energy change from flipping spin `i`.
    pub fn flip_delta(&self, x: &[i8], i: usize) -> f64 {
        -2.0 * f64::from(x[i]) * self.local_field(x, i)
    }

    /// True when no single flip lowers the energy.
    pub fn is_local_minimum(&self, x: &[i8]) -> bool {
        (0..self.num_vertices()).all(|i| self.flip_delta(x, i) >= 0.0)
    }
}

/// A configuration in `{-1, +1}^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinState(Vec<i8>);

impl SpinState {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument(format!("spin value {bad} is not ±1")));
        }
        Ok(Self(spins))
    }

    pub fn uniform(n: usize, value: i8) -> Self {
        assert!(value == 1 || value == -1);
        Self(vec![value; n])
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    pub fn set(&mut self, i: usize, value: i8) {
        assert!(value == 1 || value == -1);
        self.0[i] = value;
    }

    pub fn into_vec(self) -> Vec<i8> {
        self.0
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [i8] {
        &mut self.0
    }
}

impl Deref for SpinState {
    type Target = [i8];

    fn deref(&self) -> &[i8] {
        &self.0
    }
}

/// The model restricted to a region `R` with the complement clamped:
/// fields become `h_i + Σ_{j∉R} J_ij x_j` and only couplers inside `R` remain.
#[derive(Debug, Clone)]
pub struct Subproblem {
    members: Vec<u32>,
    model: IsingModel,
    current: Vec<i8>,
}

impl Subproblem {
    /// Global vertex ids; local variable `i` is `members()[i]`.
    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn model(&self) -> &IsingModel {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Restriction of the conditioning state to `R`.
    pub fn current(&self) -> &[i8] {
        &self.current
    }

    /// `H_R(y)`.
    pub fn energy(&self, y: &[i8]) -> Result<f64> {
        self.model.energy(y)
    }

    pub fn effective_fields(&self) -> &[f64] {
        self.model.h()
    }
}

/// Subgraph induced by `members`, with local ids in member order.
pub fn induced_graph(graph: &Graph, members: &[u32]) -> Graph {
    let local = local_index(graph.num_vertices(), members);
    let mut edges = Vec::new();
    for (a, &g) in members.iter().enumerate() {
        for &n in graph.neighbors(g as usize) {
            let b = local[n as usize];
            if b != u32::MAX && (a as u32) < b {
                edges.push((a as u32, b));
            }
        }
    }
    Graph::new(members.len(), edges).expect("induced subgraph of a simple graph")
}

fn local_index(n: usize, members: &[u32]) -> Vec<u32> {
    let mut local = vec![u32::MAX; n];
    for (i, &m) in members.iter().enumerate() {
        local[m as usize] = i as u32;
    }
    local
}

/// Conditioned subproblem on the selection's members.
pub fn build_subproblem(model: &IsingModel, state: &[i8], selection: &SubspaceSelection) -> Result<Subproblem> {
    let graph = Arc::new(induced_graph(model.graph(), selection.members()));
    build_subproblem_on(model, state, selection.members(), graph)
}

/// As [`build_subproblem`], reusing a precomputed induced graph. Lattice
/// displacements are automorphisms, so every placement of one origin region
/// shares the same local graph.
pub fn build_subproblem_on(
    model: &IsingModel,
    state: &[i8],
    members: &[u32],
    local_graph: Arc<Graph>,
) -> Result<Subproblem> {
    model.check_len(state.len())?;
    if local_graph.num_vertices() != members.len() {
        return Err(Error::Dimension { expected: members.len(), got: local_graph.num_vertices() });
    }
    let local = local_index(model.num_vertices(), members);
    let mut h = Vec::with_capacity(members.len());
    let mut j = vec![0.0; local_graph.num_edges()];
    let mut current = Vec::with_capacity(members.len());
    let mut found = 0;
    for (a, &g) in members.iter().enumerate() {
        let g = g as usize;
        let mut field = model.h[g];
        for (n, jv) in model.couplings(g) {
            let b = local[n];
            if b == u32::MAX {
                field += jv * f64::from(state[n]);
            } else if (a as u32) < b {
                let e = local_graph
                    .find_edge(a, b as usize)
                    .ok_or_else(|| Error::InvalidArgument("local graph misses an internal edge".into()))?;
                j[e] = jv;
                found += 1;
            }
        }
        h.push(field);
        current.push(state[g]);
    }
    if found != local_graph.num_edges() {
        return Err(Error::InvalidArgument("local graph has edges absent from the model".into()));
    }
    Ok(Subproblem { members: members.to_vec(), model: IsingModel::new(local_graph, h, j)?, current })
}

/// Precomputed layout for conditioning a lattice region at any placement.
///
/// Displacements are automorphisms, so with neighbours visited in
/// [`LatticeTopology::neighbor_ranks`] order the k-th neighbour of every
/// member is internal or boundary independently of the placement, and an
/// internal neighbour always lands in the same local coupler slot.
#[derive(Debug, Clone)]
pub struct SubproblemPlan {
    kind: LatticeKind,
    scale: usize,
    degree: usize,
    ranks: Vec<u8>,
    local_graph: Arc<Graph>,
    /// Member `a` owns entries `start[a]..start[a + 1]` of the internal and
    /// boundary lists. Internal entries pair a neighbour rank with its local
    /// adjacency position.
    internal_start: Vec<u32>,
    internal: Vec<(u8, u32)>,
    boundary_start: Vec<u32>,
    boundary: Vec<u8>,
}

impl SubproblemPlan {
    /// Plan for `members` placed at the lattice origin; `local_graph` must be
    /// the subgraph they induce.
    pub fn new(topology: &LatticeTopology, members: &[u32], local_graph: Arc<Graph>) -> Result<Self> {
        let graph = topology.graph();
        let k = topology.connectivity();
        let ranks = topology.neighbor_ranks();
        let local = local_index(graph.num_vertices(), members);
        let (mut internal_start, mut internal, mut boundary_start, mut boundary) = (vec![0], vec![], vec![0], vec![]);
        for (a, &g) in members.iter().enumerate() {
            let nbrs = graph.neighbors(g as usize);
            if nbrs.len() != k {
                return Err(Error::InvalidArgument("lattice graph is not regular".into()));
            }
            let local_nbrs = local_graph.neighbors(a);
            let base = local_graph.offsets()[a];
            for r in 0..k {
                let b = local[nbrs[ranks[g as usize * k + r] as usize] as usize];
                if b == u32::MAX {
                    boundary.push(r as u8);
                } else {
                    let i = local_nbrs
                        .binary_search(&b)
                        .map_err(|_| Error::InvalidArgument("local graph misses an internal edge".into()))?;
                    internal.push((r as u8, base + i as u32));
                }
            }
            internal_start.push(internal.len() as u32);
            boundary_start.push(boundary.len() as u32);
        }
        if internal.len() != 2 * local_graph.num_edges() {
            return Err(Error::InvalidArgument("local graph has edges absent from the lattice".into()));
        }
        Ok(Self {
            kind: topology.kind(),
            scale: topology.scale(),
            degree: k,
            ranks,
            local_graph,
            internal_start,
            internal,
            boundary_start,
            boundary,
        })
    }

    /// True when `model` lives on the lattice this plan was made for.
    pub fn fits(&self, model: &IsingModel) -> bool {
        model.topology().is_some_and(|t| t.kind() == self.kind && t.scale() == self.scale)
    }
}

/// [`build_subproblem_on`] for a placement of a planned region. `members`
/// must be the plan's members moved by one lattice displacement.
pub fn build_subproblem_planned(
    model: &IsingModel,
    state: &[i8],
    members: &[u32],
    plan: &SubproblemPlan,
) -> Result<Subproblem> {
    model.check_len(state.len())?;
    if !plan.fits(model) {
        return Err(Error::InvalidArgument("model is not on the planned lattice".into()));
    }
    let k = plan.degree;
    if members.len() + 1 != plan.internal_start.len() {
        return Err(Error::Dimension { expected: plan.internal_start.len() - 1, got: members.len() });
    }
    let graph = &plan.local_graph;
    let (offsets, nbrs, adj_j) = model.csr();
    let mut h = Vec::with_capacity(members.len());
    let mut adj = vec![0.0; 2 * graph.num_edges()];
    let mut current = Vec::with_capacity(members.len());
    for (a, &g) in members.iter().enumerate() {
        let g = g as usize;
        let couplers = &adj_j[offsets[g] as usize..offsets[g + 1] as usize];
        let neighbours = &nbrs[offsets[g] as usize..offsets[g + 1] as usize];
        let ranks = &plan.ranks[g * k..(g + 1) * k];
        let inner = plan.internal_start[a] as usize..plan.internal_start[a + 1] as usize;
        for &(r, p) in &plan.internal[inner] {
            adj[p as usize] = couplers[ranks[r as usize] as usize];
        }
        let mut field = model.h[g];
        let outer = plan.boundary_start[a] as usize..plan.boundary_start[a + 1] as usize;
        for &r in &plan.boundary[outer] {
            let q = ranks[r as usize] as usize;
            field += couplers[q] * f64::from(state[neighbours[q] as usize]);
        }
        h.push(field);
        current.push(state[g]);
    }
    let mut j = vec![0.0; graph.num_edges()];
    for (&e, &jv) in graph.flat_edges().iter().zip(&adj) {
        j[e as usize] = jv;
    }
    // coefficients are copied from a validated model
    let model = IsingModel { graph: Arc::clone(&plan.local_graph), topology: None, h, j, adj_j: adj };
    Ok(Subproblem { members: members.to_vec(), model, current })
}

/// Writes `assignment` onto the members of `R` and returns the exact energy
/// change. Spins are flipped one at a time so each step uses the current
/// local field.
pub fn apply_proposal(model: &IsingModel, state: &mut SpinState, members: &[u32], assignment: &[i8]) -> Result<f64> {
    model.check_len(state.len())?;
    if members.len() != assignment.len() {
        return Err(Error::Dimension { expected: members.len(), got: assignment.len() });
    }
    let mut delta = 0.0;
    for (&m, &y) in members.iter().zip(assignment) {
        let m = m as usize;
        if y != 1 && y != -1 {
            return Err(Error::InvalidArgument(format!("assignment value {y} is not ±1")));
        }
        if state[m] != y {
            delta += model.flip_delta(state, m);
            state.flip(m);
        }
    }
    Ok(delta)
}

/// `h'_i = s_i h_i`, `J'_ij = s_i s_j J_ij`; `x ↦ s∘x` maps the spectra onto
/// each other.
pub fn gauge_transform(model: &IsingModel, signs: &[i8]) -> Result<IsingModel> {
    model.check_len(signs.len())?;
    if signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(Error::InvalidArgument("gauge signs must be ±1".into()));
    }
    let h = model.h.iter().zip(signs).map(|(&h, &s)| h * f64::from(s)).collect();
    let j = model
        .graph
        .edges()
        .iter()
        .zip(&model.j)
        .map(|(&(a, b), &j)| j * f64::from(signs[a as usize] * signs[b as usize]))
        .collect();
    IsingModel::assemble(model.graph_arc(), model.topology.clone(), h, j)
}
