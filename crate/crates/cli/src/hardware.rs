use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use lnls_core::embedding::{DefectSpec, HardwareGraph};
use lnls_core::lattice::PegasusCoord;

use crate::args::HardwareArgs;

pub fn build(args: &HardwareArgs, seed: u64) -> Result<HardwareGraph> {
    let spec = match args.defects.as_str() {
        "none" => DefectSpec::None,
        "advantage" => DefectSpec::advantage_rates(args.defect_seed.unwrap_or(seed)),
        path => read_defects(Path::new(path))?,
    };
    Ok(HardwareGraph::pegasus(args.m, &spec)?)
}

fn read_defects(path: &Path) -> Result<DefectSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading defect list {}", path.display()))?;
    let mut qubits = Vec::new();
    let mut couplers = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        let coord = |s: &str| {
            s.parse::<PegasusCoord>().with_context(|| format!("{}:{}: bad coordinate", path.display(), i + 1))
        };
        match f.as_slice() {
            ["qubit", q] => qubits.push(coord(q)?),
            ["coupler", a, b] => couplers.push((coord(a)?, coord(b)?)),
            _ => bail!("{}:{}: expected 'qubit <coord>' or 'coupler <coord> <coord>'", path.display(), i + 1),
        }
    }
    Ok(DefectSpec::Explicit { qubits, couplers })
}
