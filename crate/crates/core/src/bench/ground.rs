use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ising::IsingModel;
use crate::rng::derive_seed;
use crate::samplers::{brute_force, run_sa, SaRun};

/// Models up to this size get an exhaustive ground state.
pub const BRUTE_FORCE_E0_LIMIT: usize = 20;

/// `r = (E0 - H) / E0`; zero at the ground state, one at `H = 0`.
pub fn relative_error(e0: f64, energy: f64) -> Result<f64> {
    if !(e0 < 0.0) {
        return Err(Error::InvalidArgument(format!("relative error needs a negative ground energy, got {e0}")));
    }
    Ok((e0 - energy) / e0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    PlantedExact,
    BruteForce,
    LongSa,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::PlantedExact => "planted-exact",
            Provenance::BruteForce => "brute-force",
            Provenance::LongSa => "long-sa",
        })
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "planted-exact" => Provenance::PlantedExact,
            "brute-force" => Provenance::BruteForce,
            "long-sa" => Provenance::LongSa,
            _ => return Err(Error::InvalidArgument(format!("unknown provenance '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundEstimate {
    pub e0: f64,
    pub provenance: Provenance,
    /// `(n, S)` pairs of the SA runs behind a long-SA estimate.
    pub budget: Vec<(usize, usize)>,
}

impl GroundEstimate {
    pub fn planted(energy: f64) -> Self {
        Self { e0: energy, provenance: Provenance::PlantedExact, budget: Vec::new() }
    }
}

/// Best energy over SA runs with the given `(n, S)` pairs, or the exact
/// minimum for models of at most twenty variables. Use the same budget for
/// every instance of a study.
pub fn estimate_e0(model: &IsingModel, budget: &[(usize, usize)], seed: u64) -> Result<GroundEstimate> {
    if model.num_vertices() <= BRUTE_FORCE_E0_LIMIT {
        let (_, e) = brute_force(model)?;
        return Ok(GroundEstimate { e0: e, provenance: Provenance::BruteForce, budget: Vec::new() });
    }
    if budget.is_empty() {
        return Err(Error::InvalidArgument("an SA budget is required for models this large".into()));
    }
    let mut best = f64::INFINITY;
    for (i, &(n, s)) in budget.iter().enumerate() {
        let r = run_sa(model, &SaRun::new(model, n, s, derive_seed(seed, i as u64)))?;
        best = best.min(r.energy);
    }
    Ok(GroundEstimate { e0: best, provenance: Provenance::LongSa, budget: budget.to_vec() })
}

/// Fails if any observed energy lies below the estimate, which means the
/// estimate is stale and the study has to be re-evaluated.
pub fn check_dominance(e0: f64, energies: impl IntoIterator<Item = f64>) -> Result<()> {
    let tol = 1e-9 * (1.0 + e0.abs());
    match energies.into_iter().filter(|&e| e < e0 - tol).reduce(f64::min) {
        Some(e) => Err(Error::StaleGroundEstimate { e0, observed: e }),
        None => Ok(()),
    }
}

pub fn write_ground_estimate<W: Write>(est: &GroundEstimate, mut out: W) -> Result<()> {
    writeln!(out, "# ground-estimate v1")?;
    writeln!(out, "e0 {:?}", est.e0)?;
    writeln!(out, "provenance {}", est.provenance)?;
    for (n, s) in &est.budget {
        writeln!(out, "budget {n} {s}")?;
    }
    Ok(())
}

pub fn read_ground_estimate<R: BufRead>(input: R) -> Result<GroundEstimate> {
    let mut e0 = None;
    let mut provenance = None;
    let mut budget = Vec::new();
    let bad = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let no = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        match (f[0], f.len()) {
            ("e0", 2) => e0 = Some(f[1].parse::<f64>().map_err(|_| bad(no, "bad e0"))?),
            ("provenance", 2) => provenance = Some(f[1].parse().map_err(|_| bad(no, "bad provenance"))?),
            ("budget", 3) => {
                budget.push((f[1].parse().map_err(|_| bad(no, "bad n"))?, f[2].parse().map_err(|_| bad(no, "bad S"))?))
            }
            _ => return Err(bad(no, "unrecognised line")),
        }
    }
    Ok(GroundEstimate {
        e0: e0.ok_or_else(|| bad(0, "missing e0"))?,
        provenance: provenance.ok_or_else(|| bad(0, "missing provenance"))?,
        budget,
    })
}
