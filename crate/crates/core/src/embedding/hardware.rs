use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lattice::{standard_graph, PegasusCoord};
use crate::rng::stream;

/// Defects to apply to a hardware graph.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum DefectSpec {
    #[default]
    None,
    Explicit {
        qubits: Vec<PegasusCoord>,
        couplers: Vec<(PegasusCoord, PegasusCoord)>,
    },
    /// Independent qubit and coupler failures.
    Random {
        qubit_rate: f64,
        coupler_rate: f64,
        seed: u64,
    },
}

impl DefectSpec {
    /// Rates reproducing an Advantage_system4.1 yield on P[16]: 5627/5640
    /// working qubits and 40279/40484 working couplers. A coupler also fails
    /// when either endpoint does, so the independent coupler rate solves
    /// `40484 (1-p_q)² (1-p_c) = 40279`.
    pub fn advantage_rates(seed: u64) -> Self {
        let qubit_rate = 13.0 / 5640.0;
        let alive = (1.0 - qubit_rate) * (1.0 - qubit_rate);
        let coupler_rate = 1.0 - 40279.0 / (40484.0 * alive);
        DefectSpec::Random { qubit_rate, coupler_rate, seed }
    }
}

/// Pegasus P[m] fabric with a yield mask and programmable ranges.
///
/// Qubits are indexed densely in lexicographic `(u, w, k, z)` order;
/// couplers by the graph's edge order. A coupler is usable only when it and
/// both endpoints are yielded.
#[derive(Debug, Clone)]
pub struct HardwareGraph {
    m: usize,
    coords: Vec<PegasusCoord>,
    index: HashMap<PegasusCoord, u32>,
    graph: Graph,
    dead_qubit: Vec<bool>,
    dead_coupler: Vec<bool>,
    pub h_range: (f64, f64),
    pub j_range: (f64, f64),
}

impl HardwareGraph {
    pub fn pegasus(m: usize, defects: &DefectSpec) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("Pegasus hardware needs m >= 2 (got {m})")));
        }
        let (coords, edges) = standard_graph(m, true);
        let index: HashMap<PegasusCoord, u32> = coords.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();
        let graph = Graph::new(coords.len(), edges.iter().map(|(a, b)| (index[a], index[b])))?;
        let mut hw = Self {
            m,
            dead_qubit: vec![false; coords.len()],
            dead_coupler: vec![false; graph.num_edges()],
            coords,
            index,
            graph,
            h_range: (-4.0, 4.0),
            j_range: (-2.0, 1.0),
        };
        hw.apply_defects(defects)?;
        Ok(hw)
    }

    fn apply_defects(&mut self, defects: &DefectSpec) -> Result<()> {
        match defects {
            DefectSpec::None => {}
            DefectSpec::Explicit { qubits, couplers } => {
                for q in qubits {
                    let q = self.qubit(q)?;
                    self.dead_qubit[q] = true;
                }
                for (a, b) in couplers {
                    let (a, b) = (self.qubit(a)?, self.qubit(b)?);
                    let e = self.graph.find_edge(a, b).ok_or_else(|| {
                        Error::InvalidArgument(format!("no coupler {} {}", self.coords[a], self.coords[b]))
                    })?;
                    self.dead_coupler[e] = true;
                }
            }
            &DefectSpec::Random { qubit_rate, coupler_rate, seed } => {
                for r in [qubit_rate, coupler_rate] {
                    if !(0.0..=1.0).contains(&r) {
                        return Err(Error::InvalidArgument(format!("defect rate {r} outside [0, 1]")));
                    }
                }
                let mut rng = stream(seed, 0);
                for d in &mut self.dead_qubit {
                    *d = rng.random::<f64>() < qubit_rate;
                }
                let mut rng = stream(seed, 1);
                for d in &mut self.dead_coupler {
                    *d = rng.random::<f64>() < coupler_rate;
                }
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn num_qubits(&self) -> usize {
        self.coords.len()
    }

    pub fn coord(&self, q: usize) -> PegasusCoord {
        self.coords[q]
    }

    pub fn qubit(&self, c: &PegasusCoord) -> Result<usize> {
        self.index
            .get(c)
            .map(|&q| q as usize)
            .ok_or_else(|| Error::InvalidArgument(format!("no qubit {c} in P[{}] fabric", self.m)))
    }

    /// Position in the full `2·m·12·(m-1)` Pegasus index space.
    pub fn linear_index(&self, q: usize) -> usize {
        let c = self.coords[q];
        let m = self.m;
        ((c.u as usize * m + c.w as usize) * 12 + c.k as usize) * (m - 1) + c.z as usize
    }

    pub fn qubit_yielded(&self, q: usize) -> bool {
        !self.dead_qubit[q]
    }

    /// Usable coupler: the coupler and both endpoints are yielded.
    pub fn coupler_yielded(&self, e: usize) -> bool {
        let (a, b) = self.graph.edges()[e];
        !self.dead_coupler[e] && !self.dead_qubit[a as usize] && !self.dead_qubit[b as usize]
    }

    pub fn unyielded_qubits(&self) -> Vec<usize> {
        (0..self.num_qubits()).filter(|&q| self.dead_qubit[q]).collect()
    }

    pub fn unyielded_couplers(&self) -> Vec<usize> {
        (0..self.graph.num_edges()).filter(|&e| !self.coupler_yielded(e)).collect()
    }

    pub fn yielded_qubits(&self) -> Vec<u32> {
        (0..self.num_qubits() as u32).filter(|&q| !self.dead_qubit[q as usize]).collect()
    }

    pub fn yielded_couplers(&self) -> Vec<u32> {
        (0..self.graph.num_edges() as u32).filter(|&e| self.coupler_yielded(e as usize)).collect()
    }

    /// Marks a qubit as failed.
    pub fn kill_qubit(&mut self, q: usize) {
        self.dead_qubit[q] = true;
    }

    pub fn kill_coupler(&mut self, e: usize) {
        self.dead_coupler[e] = true;
    }
}
