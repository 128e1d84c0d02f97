use std::sync::Arc;

use super::{HardwareGraph, OriginEmbedding};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ising::{IsingModel, Subproblem};

/// Fields and couplers for every yielded qubit and coupler, in the
/// hardware's yielded order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgrammedProblem {
    pub qubits: Vec<u32>,
    pub couplers: Vec<u32>,
    pub h: Vec<f64>,
    pub j: Vec<f64>,
    pub chain_strength: f64,
}

impl ProgrammedProblem {
    /// Energy of a yielded-width hardware sample.
    pub fn energy(&self, hardware: &HardwareGraph, sample: &[i8]) -> Result<f64> {
        if sample.len() != self.qubits.len() {
            return Err(Error::Dimension { expected: self.qubits.len(), got: sample.len() });
        }
        let mut pos = vec![usize::MAX; hardware.num_qubits()];
        for (i, &q) in self.qubits.iter().enumerate() {
            pos[q as usize] = i;
        }
        let mut e: f64 = self.h.iter().zip(sample).map(|(h, &s)| h * f64::from(s)).sum();
        for (&c, &j) in self.couplers.iter().zip(&self.j) {
            let (a, b) = hardware.graph().edges()[c as usize];
            e += j * f64::from(sample[pos[a as usize]] * sample[pos[b as usize]]);
        }
        Ok(e)
    }

    /// The programmed Ising model restricted to the given qubits (the
    /// embedding's footprint), with the map from footprint position to
    /// yielded position. Qubits outside the footprint carry no terms.
    pub fn footprint_model(&self, hardware: &HardwareGraph, footprint: &[u32]) -> Result<(IsingModel, Vec<usize>)> {
        let mut yielded_pos = vec![usize::MAX; hardware.num_qubits()];
        for (i, &q) in self.qubits.iter().enumerate() {
            yielded_pos[q as usize] = i;
        }
        let mut local = vec![u32::MAX; hardware.num_qubits()];
        for (i, &q) in footprint.iter().enumerate() {
            local[q as usize] = i as u32;
        }
        let mut terms = Vec::new();
        for (&c, &j) in self.couplers.iter().zip(&self.j) {
            let (a, b) = hardware.graph().edges()[c as usize];
            let (la, lb) = (local[a as usize], local[b as usize]);
            if j != 0.0 && la != u32::MAX && lb != u32::MAX {
                terms.push((la, lb, j));
            }
        }
        let graph = Graph::new(footprint.len(), terms.iter().map(|&(a, b, _)| (a, b)))?;
        let mut jv = vec![0.0; graph.num_edges()];
        for &(a, b, j) in &terms {
            jv[graph.find_edge(a as usize, b as usize).expect("edge present")] = j;
        }
        let h = footprint.iter().map(|&q| self.h[yielded_pos[q as usize]]).collect();
        let map = footprint.iter().map(|&q| yielded_pos[q as usize]).collect();
        Ok((IsingModel::new(Arc::new(graph), h, jv)?, map))
    }
}

fn check_range(what: impl FnOnce() -> String, value: f64, (lo, hi): (f64, f64)) -> Result<()> {
    if value < lo || value > hi {
        return Err(Error::ProgramRange { what: what(), value, lo, hi });
    }
    Ok(())
}

/// Maps a subproblem onto hardware. The field of each variable goes on the
/// first qubit of its chain, each coupling on the first coupler realising
/// the edge, and every chain coupler gets `-chain_strength`.
///
/// Subproblem variables must be the embedding's active variables in order.
pub fn program(
    subproblem: &Subproblem,
    embedding: &OriginEmbedding,
    hardware: &HardwareGraph,
    chain_strength: f64,
) -> Result<ProgrammedProblem> {
    let active = embedding.active_variables();
    if active.len() != subproblem.len() {
        return Err(Error::Dimension { expected: active.len(), got: subproblem.len() });
    }
    if !(chain_strength > 0.0) {
        return Err(Error::InvalidArgument(format!("chain strength must be positive (got {chain_strength})")));
    }
    let qubits = hardware.yielded_qubits();
    let couplers = hardware.yielded_couplers();
    let mut qpos = vec![usize::MAX; hardware.num_qubits()];
    for (i, &q) in qubits.iter().enumerate() {
        qpos[q as usize] = i;
    }
    let mut cpos = vec![usize::MAX; hardware.graph().num_edges()];
    for (i, &c) in couplers.iter().enumerate() {
        cpos[c as usize] = i;
    }
    let mut h = vec![0.0; qubits.len()];
    let mut j = vec![0.0; couplers.len()];
    let name = |v: usize| embedding.variables()[v].to_string();
    let fields = subproblem.effective_fields();
    for (i, &v) in active.iter().enumerate() {
        check_range(|| format!("h of variable {}", name(v)), fields[i], hardware.h_range)?;
        h[qpos[embedding.chain(v)[0] as usize]] = fields[i];
        check_range(|| format!("chain strength of variable {}", name(v)), -chain_strength, hardware.j_range)?;
        for &c in embedding.chain_couplers(v) {
            j[cpos[c as usize]] = -chain_strength;
        }
    }
    let sub = subproblem.model();
    for (e, &(a, b)) in sub.graph().edges().iter().enumerate() {
        let (va, vb) = (active[a as usize] as u32, active[b as usize] as u32);
        let key = (va.min(vb), va.max(vb));
        let idx = embedding.variable_edges().binary_search(&key).map_err(|_| {
            Error::Embedding(format!("edge {} - {} has no embedding", name(va as usize), name(vb as usize)))
        })?;
        let value = sub.j()[e];
        check_range(|| format!("J of edge {} - {}", name(va as usize), name(vb as usize)), value, hardware.j_range)?;
        let first = *embedding.edge_couplers(idx).first().ok_or_else(|| {
            Error::Embedding(format!("edge {} - {} has no yielded coupler", name(va as usize), name(vb as usize)))
        })?;
        j[cpos[first as usize]] = value;
    }
    Ok(ProgrammedProblem { qubits, couplers, h, j, chain_strength })
}

/// Variable values from yielded-width hardware samples: each active
/// variable takes the state of its chain's first qubit.
pub fn readout(samples: &[Vec<i8>], embedding: &OriginEmbedding, hardware: &HardwareGraph) -> Result<Vec<Vec<i8>>> {
    let qubits = hardware.yielded_qubits();
    let mut qpos = vec![usize::MAX; hardware.num_qubits()];
    for (i, &q) in qubits.iter().enumerate() {
        qpos[q as usize] = i;
    }
    let firsts: Vec<usize> =
        embedding.active_variables().iter().map(|&v| qpos[embedding.chain(v)[0] as usize]).collect();
    samples
        .iter()
        .map(|s| {
            if s.len() != qubits.len() {
                return Err(Error::Dimension { expected: qubits.len(), got: s.len() });
            }
            Ok(firsts.iter().map(|&p| s[p]).collect())
        })
        .collect()
}

/// Qubits used by the active chains, ascending.
pub fn footprint(embedding: &OriginEmbedding) -> Vec<u32> {
    let mut q: Vec<u32> =
        embedding.active_variables().iter().flat_map(|&v| embedding.chain(v).iter().copied()).collect();
    q.sort_unstable();
    q
}
