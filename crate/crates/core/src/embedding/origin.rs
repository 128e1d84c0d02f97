use std::collections::HashSet;

use super::cover::min_vertex_cover;
use super::HardwareGraph;
use crate::error::{Error, Result};
use crate::ising::induced_graph;
use crate::lattice::{
    nice_qubit, Coord, CubicCoord, LatticeKind, LatticeTopology, PegasusCoord, PegasusRegion, SubspaceShape,
};

/// Embedding of one subspace shape placed at the lattice origin.
///
/// Variables are addressed by coordinates on a reference lattice large
/// enough that the shape does not wrap; their order matches
/// [`SubspaceShape::origin_members`] on that lattice. Couplers are hardware
/// edge indices.
#[derive(Debug, Clone, PartialEq)]
pub struct OriginEmbedding {
    pub(crate) shape: SubspaceShape,
    pub(crate) max_chain_length: usize,
    pub(crate) variables: Vec<Coord>,
    pub(crate) chains: Vec<Vec<u32>>,
    pub(crate) chain_couplers: Vec<Vec<u32>>,
    pub(crate) variable_edges: Vec<(u32, u32)>,
    pub(crate) edge_couplers: Vec<Vec<u32>>,
    pub(crate) vacant: Vec<bool>,
    pub(crate) greedy_cover: bool,
}

/// Variables of a shape with their non-wrapping adjacency.
pub(crate) fn shape_variables(shape: &SubspaceShape) -> Result<(Vec<Coord>, Vec<(u32, u32)>)> {
    let l = match *shape {
        SubspaceShape::Cuboid(ext) => ext.iter().copied().max().unwrap_or(1) + 1,
        SubspaceShape::Pegasus(PegasusRegion::Nice(m) | PegasusRegion::Fabric(m)) => m + 2,
    }
    .max(3);
    let topo = LatticeTopology::build(shape.lattice_kind(), l)?;
    let members = shape.origin_members(&topo)?;
    let coords = members.iter().map(|&v| topo.coord(v as usize)).collect();
    let edges = induced_graph(topo.graph(), &members).edges().to_vec();
    Ok((coords, edges))
}

/// Lattice vertex of a reference coordinate on a lattice of scale `l`.
pub(crate) fn wrap_coord(c: &Coord, l: u32) -> Coord {
    match *c {
        Coord::Cubic(c) => Coord::Cubic(CubicCoord::new(c.i1 % l, c.i2 % l, c.i3 % l)),
        Coord::Pegasus(c) => Coord::Pegasus(PegasusCoord { w: c.w % l, z: c.z % l, ..c }),
    }
}

impl OriginEmbedding {
    /// Embedding from explicit chains (one per shape variable, in variable
    /// order). Couplers are discovered from the full hardware graph; call
    /// [`OriginEmbedding::trim_for_defects`] to account for yield.
    pub fn from_chains(
        shape: SubspaceShape,
        max_chain_length: usize,
        chains: Vec<Vec<u32>>,
        hardware: &HardwareGraph,
    ) -> Result<Self> {
        let (variables, variable_edges) = shape_variables(&shape)?;
        if chains.len() != variables.len() {
            return Err(Error::Embedding(format!(
                "shape {shape} has {} variables but {} chains were given",
                variables.len(),
                chains.len()
            )));
        }
        let nq = hardware.num_qubits();
        let mut owner = vec![u32::MAX; nq];
        for (v, chain) in chains.iter().enumerate() {
            for &q in chain {
                if q as usize >= nq {
                    return Err(Error::Embedding(format!("qubit index {q} outside hardware")));
                }
                if owner[q as usize] != u32::MAX {
                    return Err(Error::Embedding(format!(
                        "chains are not disjoint: qubit {} used twice",
                        hardware.coord(q as usize)
                    )));
                }
                owner[q as usize] = v as u32;
            }
        }
        let mut chain_couplers = vec![Vec::new(); chains.len()];
        let mut edge_couplers = vec![Vec::new(); variable_edges.len()];
        for (e, &(a, b)) in hardware.graph().edges().iter().enumerate() {
            let (va, vb) = (owner[a as usize], owner[b as usize]);
            if va == u32::MAX || vb == u32::MAX {
                continue;
            }
            if va == vb {
                chain_couplers[va as usize].push(e as u32);
            } else {
                let key = (va.min(vb), va.max(vb));
                if let Ok(i) = variable_edges.binary_search(&key) {
                    edge_couplers[i].push(e as u32);
                }
            }
        }
        Ok(Self {
            shape,
            max_chain_length,
            vacant: vec![false; chains.len()],
            variables,
            chains,
            chain_couplers,
            variable_edges,
            edge_couplers,
            greedy_cover: false,
        })
    }

    pub fn shape(&self) -> SubspaceShape {
        self.shape
    }

    pub fn max_chain_length(&self) -> usize {
        self.max_chain_length
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[Coord] {
        &self.variables
    }

    pub fn chain(&self, v: usize) -> &[u32] {
        &self.chains[v]
    }

    pub fn chain_couplers(&self, v: usize) -> &[u32] {
        &self.chain_couplers[v]
    }

    pub fn variable_edges(&self) -> &[(u32, u32)] {
        &self.variable_edges
    }

    /// Hardware couplers realising variable edge `i`.
    pub fn edge_couplers(&self, i: usize) -> &[u32] {
        &self.edge_couplers[i]
    }

    pub fn is_vacant(&self, v: usize) -> bool {
        self.vacant[v]
    }

    pub fn vacancies(&self) -> Vec<usize> {
        (0..self.vacant.len()).filter(|&v| self.vacant[v]).collect()
    }

    /// Non-vacant variables in variable order; these are the subproblem
    /// variables.
    pub fn active_variables(&self) -> Vec<usize> {
        (0..self.vacant.len()).filter(|&v| !self.vacant[v]).collect()
    }

    /// True when some conflict component was too large for the exact cover.
    pub fn used_greedy_cover(&self) -> bool {
        self.greedy_cover
    }

    /// Lattice vertices of the active variables at the zero offset. Fails if
    /// the lattice is a different kind, too small, or if wrapping creates
    /// lattice edges the embedding does not realise.
    pub fn lattice_members(&self, topology: &LatticeTopology) -> Result<Vec<u32>> {
        self.shape.check_fits(topology)?;
        let l = topology.scale() as u32;
        let active = self.active_variables();
        let members: Vec<u32> = active
            .iter()
            .map(|&v| topology.id_of(&wrap_coord(&self.variables[v], l)).expect("shape fits") as u32)
            .collect();
        let realised: HashSet<(u32, u32)> = self.variable_edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        for &(a, b) in induced_graph(topology.graph(), &members).edges() {
            let (va, vb) = (active[a as usize] as u32, active[b as usize] as u32);
            if !realised.contains(&(va.min(vb), va.max(vb))) {
                return Err(Error::Shape {
                    shape: self.shape.to_string(),
                    reason: format!("wraps on a lattice of scale {l}, creating couplings the embedding cannot realise"),
                });
            }
        }
        Ok(members)
    }

    /// Checks the invariants against the yielded hardware graph and names
    /// the first violation.
    pub fn validate(&self, hardware: &HardwareGraph) -> Result<()> {
        let fail = |msg: String| Err(Error::Embedding(msg));
        let (variables, edges) = shape_variables(&self.shape)?;
        if variables != self.variables {
            return fail(format!("variable set does not match shape {}", self.shape));
        }
        if edges != self.variable_edges || self.edge_couplers.len() != edges.len() {
            return fail("variable edges do not match the shape".into());
        }
        let lens = [self.chains.len(), self.chain_couplers.len(), self.vacant.len()];
        if lens.iter().any(|&n| n != variables.len()) {
            return fail("per-variable tables have inconsistent lengths".into());
        }
        let g = hardware.graph();
        let nq = hardware.num_qubits();
        let mut owner = vec![u32::MAX; nq];
        for (v, chain) in self.chains.iter().enumerate() {
            if self.vacant[v] {
                continue;
            }
            let name = &self.variables[v];
            if chain.is_empty() {
                return fail(format!("chain of variable {name} is empty"));
            }
            if chain.len() > self.max_chain_length {
                return fail(format!(
                    "chain length bound: variable {name} has {} qubits, maximum {}",
                    chain.len(),
                    self.max_chain_length
                ));
            }
            for &q in chain {
                let q = q as usize;
                if q >= nq {
                    return fail(format!("chain of variable {name} uses qubit index {q} outside hardware"));
                }
                if !hardware.qubit_yielded(q) {
                    return fail(format!("chain of variable {name} uses unyielded qubit {}", hardware.coord(q)));
                }
                if owner[q] != u32::MAX {
                    return fail(format!("chains are not disjoint: qubit {} is shared", hardware.coord(q)));
                }
                owner[q] = v as u32;
            }
            for &e in &self.chain_couplers[v] {
                let Some(&(a, b)) = g.edges().get(e as usize) else {
                    return fail(format!("chain of variable {name} lists unknown coupler {e}"));
                };
                if owner[a as usize] != v as u32 || owner[b as usize] != v as u32 {
                    return fail(format!("chain coupler {e} of variable {name} leaves the chain"));
                }
                if !hardware.coupler_yielded(e as usize) {
                    return fail(format!("chain of variable {name} relies on unyielded coupler {e}"));
                }
            }
            // connectivity through the listed chain couplers
            let mut reached = vec![chain[0]];
            let mut grew = true;
            while grew {
                grew = false;
                for &e in &self.chain_couplers[v] {
                    let (a, b) = g.edges()[e as usize];
                    if reached.contains(&a) != reached.contains(&b) {
                        reached.push(if reached.contains(&a) { b } else { a });
                        grew = true;
                    }
                }
            }
            if reached.len() != chain.len() {
                return fail(format!("chain of variable {name} is not connected"));
            }
        }
        for (i, &(a, b)) in self.variable_edges.iter().enumerate() {
            if self.vacant[a as usize] || self.vacant[b as usize] {
                continue;
            }
            let (na, nb) = (&self.variables[a as usize], &self.variables[b as usize]);
            if self.edge_couplers[i].is_empty() {
                return fail(format!("edge {na} - {nb} is not realised by any yielded coupler"));
            }
            for &e in &self.edge_couplers[i] {
                let Some(&(p, q)) = g.edges().get(e as usize) else {
                    return fail(format!("edge {na} - {nb} lists unknown coupler {e}"));
                };
                let ends = (owner[p as usize], owner[q as usize]);
                if ends != (a, b) && ends != (b, a) {
                    return fail(format!("coupler {e} listed for edge {na} - {nb} does not join their chains"));
                }
                if !hardware.coupler_yielded(e as usize) {
                    return fail(format!("edge {na} - {nb} relies on unyielded coupler {e}"));
                }
            }
        }
        Ok(())
    }

    /// Accounts for hardware defects: chains touching a failed qubit or
    /// chain coupler become vacancies, dead couplers are dropped, and a
    /// minimum vertex cover of the remaining unrealisable variable edges is
    /// vacated as well (lexicographically smallest among minimum covers).
    pub fn trim_for_defects(&self, hardware: &HardwareGraph) -> OriginEmbedding {
        let mut out = self.clone();
        for v in 0..out.chains.len() {
            let broken = out.chains[v].iter().any(|&q| !hardware.qubit_yielded(q as usize))
                || out.chain_couplers[v].iter().any(|&e| !hardware.coupler_yielded(e as usize));
            if broken {
                out.vacant[v] = true;
            }
        }
        for list in out.chain_couplers.iter_mut().chain(out.edge_couplers.iter_mut()) {
            list.retain(|&e| hardware.coupler_yielded(e as usize));
        }
        let conflicts: Vec<(u32, u32)> = out
            .variable_edges
            .iter()
            .zip(&out.edge_couplers)
            .filter(|(&(a, b), c)| c.is_empty() && !out.vacant[a as usize] && !out.vacant[b as usize])
            .map(|(&e, _)| e)
            .collect();
        let cover = min_vertex_cover(&conflicts);
        for v in cover.vertices {
            out.vacant[v as usize] = true;
        }
        out.greedy_cover |= cover.greedy;
        out
    }
}

/// Chain-length-2 embedding of an `a×b×c` cuboid into Pegasus P[m].
///
/// One axis with extent at most 12 runs along the three K4,4 tiles of a
/// nice cell (four variables per tile); the other two axes step across
/// cells. Variable `(x, y, 4t + j)` is the chain of vertical and horizontal
/// qubits `j` of tile `t` in cell `(x, y)`.
pub fn cubic_embedding(hardware: &HardwareGraph, shape: [usize; 3]) -> Result<OriginEmbedding> {
    let cells = hardware.m() - 1;
    // longest axis that fits along the tiles; the last one on ties
    let axis = (0..3).filter(|&p| shape[p] <= 12).max_by_key(|&p| (shape[p], p)).ok_or_else(|| Error::Shape {
        shape: SubspaceShape::Cuboid(shape).to_string(),
        reason: "some extent must be at most 12".into(),
    })?;
    let others: Vec<usize> = (0..3).filter(|&p| p != axis).collect();
    if others.iter().any(|&p| shape[p] > cells) {
        return Err(Error::Shape {
            shape: SubspaceShape::Cuboid(shape).to_string(),
            reason: format!("P[{}] offers {cells}×{cells} cells with 12 variables each", hardware.m()),
        });
    }
    let sub = SubspaceShape::Cuboid(shape);
    let (vars, _) = shape_variables(&sub)?;
    let mut chains = Vec::with_capacity(vars.len());
    for v in &vars {
        let Coord::Cubic(c) = v else { unreachable!() };
        let comp = [c.i1, c.i2, c.i3];
        let (x, y, z) = (comp[others[0]], comp[others[1]], comp[axis]);
        let (t, j) = (z / 4, z % 4);
        chains.push(vec![
            hardware.qubit(&nice_qubit(x, y, t, 0, j))? as u32,
            hardware.qubit(&nice_qubit(x, y, t, 1, j))? as u32,
        ]);
    }
    OriginEmbedding::from_chains(sub, 2, chains, hardware)
}

/// Identity embedding of a Pegasus region: every variable is the hardware
/// qubit with the same coordinates.
pub fn pegasus_embedding(hardware: &HardwareGraph, region: PegasusRegion) -> Result<OriginEmbedding> {
    let m = hardware.m();
    let fits = match region {
        PegasusRegion::Nice(ms) => ms >= 1 && ms < m,
        PegasusRegion::Fabric(ms) => ms >= 1 && ms < m,
    };
    let shape = SubspaceShape::Pegasus(region);
    if !fits {
        return Err(Error::Shape { shape: shape.to_string(), reason: format!("exceeds P[{m}] hardware") });
    }
    let (vars, _) = shape_variables(&shape)?;
    let chains = vars
        .iter()
        .map(|v| match v {
            Coord::Pegasus(c) => hardware.qubit(c).map(|q| vec![q as u32]),
            Coord::Cubic(_) => unreachable!(),
        })
        .collect::<Result<Vec<_>>>()?;
    OriginEmbedding::from_chains(shape, 1, chains, hardware)
}

/// Defect-trimmed embeddings for a shape: every distinct rotation of a
/// cuboid, or the identity embedding of a Pegasus region.
pub fn make_origin_embeddings(
    hardware: &HardwareGraph,
    kind: LatticeKind,
    shape: &SubspaceShape,
) -> Result<Vec<OriginEmbedding>> {
    if shape.lattice_kind() != kind {
        return Err(Error::Shape { shape: shape.to_string(), reason: format!("not a {kind} shape") });
    }
    let mut out = Vec::new();
    for s in shape.rotations() {
        let emb = match s {
            SubspaceShape::Cuboid(ext) => cubic_embedding(hardware, ext)?,
            SubspaceShape::Pegasus(r) => pegasus_embedding(hardware, r)?,
        };
        let trimmed = emb.trim_for_defects(hardware);
        trimmed.validate(hardware)?;
        out.push(trimmed);
    }
    Ok(out)
}
