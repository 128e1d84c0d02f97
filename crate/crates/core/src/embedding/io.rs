use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::origin::shape_variables;
use super::{HardwareGraph, OriginEmbedding};
use crate::error::{Error, Result};
use crate::lattice::{Coord, LatticeKind, PegasusCoord, SubspaceShape};

/// Writes an embedding: header, one `var` record per variable (coordinate
/// then chain qubit coordinates) and one `vacant` record per vacancy.
pub fn write_embedding<W: Write>(embedding: &OriginEmbedding, hardware: &HardwareGraph, mut out: W) -> Result<()> {
    writeln!(out, "# origin-embedding v1")?;
    writeln!(out, "lattice {}", embedding.shape().lattice_kind())?;
    writeln!(out, "shape {}", embedding.shape())?;
    writeln!(out, "hardware pegasus")?;
    writeln!(out, "m {}", hardware.m())?;
    writeln!(out, "max_chain {}", embedding.max_chain_length())?;
    writeln!(out, "variables {}", embedding.num_variables())?;
    for (v, c) in embedding.variables().iter().enumerate() {
        write!(out, "var {c}")?;
        for &q in embedding.chain(v) {
            write!(out, " {}", hardware.coord(q as usize))?;
        }
        writeln!(out)?;
    }
    for v in embedding.vacancies() {
        writeln!(out, "vacant {}", embedding.variables()[v])?;
    }
    Ok(())
}

/// Reads an embedding written by [`write_embedding`]. Structural problems
/// (unknown qubits, shared qubits, missing variables) are reported here;
/// yield-dependent invariants are left to [`OriginEmbedding::validate`].
pub fn read_embedding<R: BufRead>(input: R, hardware: &HardwareGraph) -> Result<OriginEmbedding> {
    let mut header: HashMap<String, (usize, String)> = HashMap::new();
    let mut vars: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut vacant: Vec<(usize, String)> = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut parts = t.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let rest: Vec<String> = parts.map(str::to_string).collect();
        match key {
            "var" if !rest.is_empty() => vars.push((i + 1, rest[0].clone(), rest[1..].to_vec())),
            "vacant" if rest.len() == 1 => vacant.push((i + 1, rest[0].clone())),
            "lattice" | "shape" | "hardware" | "m" | "max_chain" | "variables" if rest.len() == 1 => {
                header.insert(key.to_string(), (i + 1, rest[0].clone()));
            }
            _ => return Err(Error::Parse { line: i + 1, msg: format!("unrecognised record '{t}'") }),
        }
    }
    let get =
        |k: &str| header.get(k).cloned().ok_or_else(|| Error::Parse { line: 0, msg: format!("missing '{k}' header") });
    let number = |k: &str| -> Result<usize> {
        let (ln, v) = get(k)?;
        v.parse().map_err(|_| Error::Parse { line: ln, msg: format!("bad {k} '{v}'") })
    };
    let (ln, kind) = get("lattice")?;
    let kind: LatticeKind = kind.parse().map_err(|e: Error| Error::Parse { line: ln, msg: e.to_string() })?;
    let (ln, shape) = get("shape")?;
    let shape: SubspaceShape = shape.parse().map_err(|e: Error| Error::Parse { line: ln, msg: e.to_string() })?;
    if shape.lattice_kind() != kind {
        return Err(Error::Parse { line: ln, msg: format!("shape {shape} is not a {kind} shape") });
    }
    let (ln, hw) = get("hardware")?;
    if hw != "pegasus" {
        return Err(Error::Parse { line: ln, msg: format!("unsupported hardware '{hw}'") });
    }
    if number("m")? != hardware.m() {
        return Err(Error::Embedding(format!("file targets P[{}], hardware is P[{}]", number("m")?, hardware.m())));
    }
    let max_chain = number("max_chain")?;
    let (variables, _) = shape_variables(&shape)?;
    if number("variables")? != variables.len() || vars.len() != variables.len() {
        return Err(Error::Embedding(format!(
            "shape {shape} has {} variables, file declares {} and lists {}",
            variables.len(),
            number("variables")?,
            vars.len()
        )));
    }
    let index: HashMap<String, usize> = variables.iter().enumerate().map(|(i, c)| (c.to_string(), i)).collect();
    let lookup = |ln: usize, c: &str| {
        index
            .get(&canonical(kind, c, ln)?)
            .copied()
            .ok_or_else(|| Error::Embedding(format!("line {ln}: variable {c} is not part of shape {shape}")))
    };
    let mut chains = vec![None; variables.len()];
    for (ln, c, qs) in &vars {
        let v = lookup(*ln, c)?;
        if chains[v].is_some() {
            return Err(Error::Embedding(format!("line {ln}: variable {c} listed twice")));
        }
        let chain = qs
            .iter()
            .map(|q| {
                let pc: PegasusCoord = q.parse().map_err(|e: Error| Error::Parse { line: *ln, msg: e.to_string() })?;
                hardware.qubit(&pc).map(|q| q as u32)
            })
            .collect::<Result<Vec<u32>>>()?;
        chains[v] = Some(chain);
    }
    let chains: Vec<Vec<u32>> = chains.into_iter().map(|c| c.expect("every variable seen")).collect();
    let mut emb = OriginEmbedding::from_chains(shape, max_chain, chains, hardware)?;
    for (ln, c) in &vacant {
        let v = lookup(*ln, c)?;
        emb.vacant[v] = true;
    }
    Ok(emb)
}

fn canonical(kind: LatticeKind, c: &str, line: usize) -> Result<String> {
    let parsed = match kind {
        LatticeKind::Cubic => c.parse().map(Coord::Cubic),
        LatticeKind::ToricPegasus => c.parse().map(Coord::Pegasus),
    };
    parsed.map(|c| c.to_string()).map_err(|e| Error::Parse { line, msg: e.to_string() })
}
