//! Text formats for instances and planted solutions.
//!
//! Values are written with Rust's shortest round-trip float formatting, so
//! write → read → write reproduces the same bytes.

use std::io::{BufRead, Write};
use std::sync::Arc;

use super::{IsingModel, SpinState};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lattice::{LatticeKind, LatticeTopology};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceMeta {
    pub ensemble: String,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedSolution {
    pub state: SpinState,
    pub ground_energy: f64,
}

fn coord_text(model: &IsingModel, v: usize) -> String {
    match model.topology() {
        Some(t) => t.coord(v).to_string(),
        None => v.to_string(),
    }
}

fn parse_vertex(topology: Option<&LatticeTopology>, n: usize, s: &str, line: usize) -> Result<usize> {
    let bad = |msg: String| Error::Parse { line, msg };
    match topology {
        Some(t) => {
            let c = t.parse_coord(s).map_err(|e| bad(e.to_string()))?;
            Ok(t.id_of(&c).expect("parse_coord checks range"))
        }
        None => {
            let v: usize = s.parse().map_err(|_| bad(format!("bad vertex id '{s}'")))?;
            if v >= n {
                return Err(bad(format!("vertex {v} out of range")));
            }
            Ok(v)
        }
    }
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse { line, msg: format!("bad number '{s}'") })
}

pub fn write_instance<W: Write>(model: &IsingModel, meta: &InstanceMeta, mut out: W) -> Result<()> {
    writeln!(out, "# ising-instance v1")?;
    match model.topology() {
        Some(t) => {
            writeln!(out, "lattice {}", t.kind())?;
            writeln!(out, "scale {}", t.scale())?;
        }
        None => {
            writeln!(out, "lattice graph")?;
            writeln!(out, "vertices {}", model.num_vertices())?;
        }
    }
    writeln!(out, "ensemble {}", meta.ensemble)?;
    match meta.seed {
        Some(s) => writeln!(out, "seed {s}")?,
        None => writeln!(out, "seed none")?,
    }
    writeln!(out, "couplers {}", model.graph().num_edges())?;
    for (&(a, b), j) in model.graph().edges().iter().zip(model.j()) {
        writeln!(out, "J {} {} {}", coord_text(model, a as usize), coord_text(model, b as usize), j)?;
    }
    let fields: Vec<usize> = (0..model.num_vertices()).filter(|&i| model.h()[i] != 0.0).collect();
    writeln!(out, "fields {}", fields.len())?;
    for i in fields {
        writeln!(out, "h {} {}", coord_text(model, i), model.h()[i])?;
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    number: usize,
}

impl<R: BufRead> Lines<R> {
    fn next(&mut self) -> Result<Option<(usize, String)>> {
        for line in self.inner.by_ref() {
            self.number += 1;
            let line = line?;
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Ok(Some((self.number, t.to_string())));
            }
        }
        Ok(None)
    }

    fn expect(&mut self, key: &str) -> Result<(usize, String)> {
        match self.next()? {
            Some((n, l)) => match l.split_once(' ') {
                Some((k, v)) if k == key => Ok((n, v.trim().to_string())),
                _ => Err(Error::Parse { line: n, msg: format!("expected '{key}' record, found '{l}'") }),
            },
            None => Err(Error::Parse { line: self.number, msg: format!("missing '{key}' record") }),
        }
    }

    fn expect_count(&mut self, key: &str) -> Result<usize> {
        let (n, v) = self.expect(key)?;
        v.parse().map_err(|_| Error::Parse { line: n, msg: format!("bad count '{v}'") })
    }
}

pub fn read_instance<R: BufRead>(input: R) -> Result<(IsingModel, InstanceMeta)> {
    let mut lines = Lines { inner: input.lines(), number: 0 };
    let (kline, kind) = lines.expect("lattice")?;
    let topology = match kind.as_str() {
        "graph" => None,
        other => {
            let kind: LatticeKind =
                other.parse().map_err(|e: Error| Error::Parse { line: kline, msg: e.to_string() })?;
            let l = lines.expect_count("scale")?;
            Some(LatticeTopology::build(kind, l)?)
        }
    };
    let n = match &topology {
        Some(t) => t.num_vertices(),
        None => lines.expect_count("vertices")?,
    };
    let ensemble = lines.expect("ensemble")?.1;
    let (sline, seed) = lines.expect("seed")?;
    let seed = match seed.as_str() {
        "none" => None,
        s => Some(s.parse().map_err(|_| Error::Parse { line: sline, msg: format!("bad seed '{s}'") })?),
    };
    let count = lines.expect_count("couplers")?;
    let mut terms = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, v) = lines.expect("J")?;
        let parts: Vec<&str> = v.split_whitespace().collect();
        let [a, b, j] = parts[..] else {
            return Err(Error::Parse { line: ln, msg: "J record needs two vertices and a value".into() });
        };
        terms.push((
            parse_vertex(topology.as_ref(), n, a, ln)? as u32,
            parse_vertex(topology.as_ref(), n, b, ln)? as u32,
            parse_f64(j, ln)?,
        ));
    }
    let fcount = lines.expect_count("fields")?;
    let mut h = vec![0.0; n];
    for _ in 0..fcount {
        let (ln, v) = lines.expect("h")?;
        let Some((a, val)) = v.split_once(' ') else {
            return Err(Error::Parse { line: ln, msg: "h record needs a vertex and a value".into() });
        };
        h[parse_vertex(topology.as_ref(), n, a, ln)?] = parse_f64(val.trim(), ln)?;
    }
    if let Some((ln, l)) = lines.next()? {
        return Err(Error::Parse { line: ln, msg: format!("unexpected trailing record '{l}'") });
    }
    let model = match &topology {
        Some(t) => {
            let g = t.graph();
            if terms.len() != g.num_edges() {
                return Err(Error::Dimension { expected: g.num_edges(), got: terms.len() });
            }
            let mut j = vec![f64::NAN; g.num_edges()];
            for &(a, b, v) in &terms {
                let e = g.find_edge(a as usize, b as usize).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "coupler {} {} is not a lattice edge",
                        t.coord(a as usize),
                        t.coord(b as usize)
                    ))
                })?;
                if !j[e].is_nan() {
                    return Err(Error::InvalidArgument(format!(
                        "coupler {} {} listed twice",
                        t.coord(a as usize),
                        t.coord(b as usize)
                    )));
                }
                j[e] = v;
            }
            IsingModel::on_lattice(t, h, j)?
        }
        None => {
            let graph = Graph::new(n, terms.iter().map(|&(a, b, _)| (a, b)))?;
            let mut j = vec![0.0; graph.num_edges()];
            for &(a, b, v) in &terms {
                j[graph.find_edge(a as usize, b as usize).expect("edge present")] = v;
            }
            IsingModel::new(Arc::new(graph), h, j)?
        }
    };
    Ok((model, InstanceMeta { ensemble, seed }))
}

pub fn write_planted<W: Write>(model: &IsingModel, planted: &PlantedSolution, mut out: W) -> Result<()> {
    if planted.state.len() != model.num_vertices() {
        return Err(Error::Dimension { expected: model.num_vertices(), got: planted.state.len() });
    }
    writeln!(out, "# planted-state v1")?;
    writeln!(out, "ground_energy {}", planted.ground_energy)?;
    writeln!(out, "spins {}", planted.state.len())?;
    for (i, &s) in planted.state.iter().enumerate() {
        writeln!(out, "s {} {}", coord_text(model, i), s)?;
    }
    Ok(())
}

pub fn read_planted<R: BufRead>(model: &IsingModel, input: R) -> Result<PlantedSolution> {
    let mut lines = Lines { inner: input.lines(), number: 0 };
    let (eline, e) = lines.expect("ground_energy")?;
    let ground_energy = parse_f64(&e, eline)?;
    let count = lines.expect_count("spins")?;
    let n = model.num_vertices();
    if count != n {
        return Err(Error::Dimension { expected: n, got: count });
    }
    let mut spins = vec![0i8; n];
    for _ in 0..n {
        let (ln, v) = lines.expect("s")?;
        let Some((a, val)) = v.split_once(' ') else {
            return Err(Error::Parse { line: ln, msg: "spin record needs a vertex and a value".into() });
        };
        let i = parse_vertex(model.topology(), n, a, ln)?;
        spins[i] = val.trim().parse().map_err(|_| Error::Parse { line: ln, msg: format!("bad spin '{val}'") })?;
    }
    Ok(PlantedSolution { state: SpinState::new(spins)?, ground_energy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn round_trip(model: &IsingModel, meta: &InstanceMeta) {
        let mut first = Vec::new();
        write_instance(model, meta, &mut first).unwrap();
        let (back, meta2) = read_instance(first.as_slice()).unwrap();
        assert_eq!(&meta2, meta);
        let mut second = Vec::new();
        write_instance(&back, &meta2, &mut second).unwrap();
        assert_eq!(first, second);
        assert_eq!(back.j(), model.j());
        assert_eq!(back.h(), model.h());
    }

    #[test]
    fn lattice_instances_round_trip_bit_exactly() {
        let mut rng = stream(1, 0);
        for t in [LatticeTopology::cubic(3).unwrap(), LatticeTopology::toric_pegasus(3).unwrap()] {
            let n = t.num_vertices();
            let m = t.graph().num_edges();
            let h = (0..n).map(|i| if i % 3 == 0 { rng.random::<f64>() - 0.5 } else { 0.0 }).collect();
            let j = (0..m).map(|_| rng.random::<f64>() * 3.0 - 1.0 / 3.0).collect();
            let model = IsingModel::on_lattice(&t, h, j).unwrap();
            round_trip(&model, &InstanceMeta { ensemble: "custom".into(), seed: Some(42) });
        }
    }

    #[test]
    fn graph_instances_round_trip() {
        let m = IsingModel::from_terms(4, &[(0, 3, 0.1), (1, 2, -1e-300)], vec![2.0, 0.0, -0.0, 1.5]).unwrap();
        round_trip(&m, &InstanceMeta { ensemble: "graph".into(), seed: None });
    }

    #[test]
    fn malformed_input_names_the_line() {
        let text = "lattice cubic\nscale 3\nensemble x\nseed 1\ncouplers 1\nJ 0,0,0 oops 1\n";
        match read_instance(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn planted_sidecar_round_trip() {
        let t = LatticeTopology::cubic(3).unwrap();
        let model = IsingModel::on_lattice(&t, vec![0.0; 27], vec![-1.0; 81]).unwrap();
        let state = SpinState::random(27, &mut stream(2, 0));
        let p = PlantedSolution { state, ground_energy: -81.0 };
        let mut buf = Vec::new();
        write_planted(&model, &p, &mut buf).unwrap();
        assert_eq!(read_planted(&model, buf.as_slice()).unwrap(), p);
    }
}
