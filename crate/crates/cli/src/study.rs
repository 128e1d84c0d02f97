//! `bench`: a study manifest names an instance ensemble, the ground-energy
//! budget and a list of methods. Each method gets an aggregate CSV in the
//! output directory and all methods share one burn-down plot.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use lnls_core::bench::{
    aggregate_median, check_dominance, emit_report, estimate_e0, median_ci, relative_error, sample_curves,
    sgd_burn_down, AggregateCurve, BaselineClock, CurvePoint, GroundEstimate, ReportFormat, TimeAxis,
};
use lnls_core::generators::{gen_ferromagnet, gen_pm_j, gen_tile_planted, solve_tile_distribution};
use lnls_core::ising::IsingModel;
use lnls_core::lattice::{LatticeKind, LatticeTopology, SubspaceShape};
use lnls_core::lnls::{run_workflow_variant, BurnDownRecord, LnlsConfig, SubsolverKind, Variant};
use lnls_core::rng::derive_seed;
use lnls_core::samplers::{run_sa, SaRun};
use rayon::prelude::*;
use serde::de::{self, Deserializer};
use serde::Deserialize;
use serde_json::json;

use crate::args::{ClockArg, HardwareArgs, TimingArgs};
use crate::commands::{regions, subsolver_spec, timing_model, Printer};
use crate::{hardware, usage};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    /// Relative to the manifest's directory.
    pub output_dir: PathBuf,
    /// Overrides the global seed.
    pub seed: Option<u64>,
    pub instances: InstanceSpec,
    #[serde(default)]
    pub e0: E0Spec,
    #[serde(rename = "method")]
    pub methods: Vec<Method>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    #[serde(deserialize_with = "parsed")]
    pub kind: LatticeKind,
    #[serde(rename = "L")]
    pub l: usize,
    /// `pmj`, `ferro` or `tiles`.
    pub ensemble: String,
    #[serde(default = "default_target")]
    pub target: f64,
    /// Explicit instance seeds; `0..count` if absent.
    pub seeds: Option<Vec<u64>>,
    pub count: Option<usize>,
}

fn default_target() -> f64 {
    -1.8
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct E0Spec {
    /// `[n, S]` pairs.
    pub budget: Vec<(usize, usize)>,
}

impl Default for E0Spec {
    fn default() -> Self {
        Self { budget: vec![(4, 1 << 16)] }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "solver", rename_all = "kebab-case")]
pub enum Method {
    Lnls(LnlsMethod),
    Sa(SaMethod),
    Sgd(SgdMethod),
}

impl Method {
    fn label(&self) -> &str {
        match self {
            Method::Lnls(m) => &m.label,
            Method::Sa(m) => &m.label,
            Method::Sgd(m) => &m.label,
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct LnlsMethod {
    pub label: String,
    #[serde(deserialize_with = "parsed")]
    pub subsolver: SubsolverKind,
    #[serde(deserialize_with = "parsed_list")]
    pub shapes: Vec<SubspaceShape>,
    #[serde(default = "yes")]
    pub rotations: bool,
    pub sweeps: Option<usize>,
    pub reads: Option<usize>,
    #[serde(default = "default_chain_strength")]
    pub chain_strength: f64,
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
    #[serde(default, deserialize_with = "parsed")]
    pub variant: Variant,
    #[serde(default = "default_runs")]
    pub runs: usize,
    pub clock: Option<String>,
    pub qpu_reads: Option<usize>,
    #[serde(default = "default_t_p")]
    pub t_p: f64,
    #[serde(default = "default_t_ro")]
    pub t_ro: f64,
    #[serde(default = "default_t_a")]
    pub t_a: f64,
    #[serde(default)]
    pub network_overhead: f64,
    #[serde(default = "default_rate")]
    pub ns_per_update: f64,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_defects")]
    pub defects: String,
    pub defect_seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
pub struct SaMethod {
    pub label: String,
    #[serde(default = "default_runs")]
    pub samples: usize,
    /// One curve point per sweep count.
    pub sweeps: Vec<usize>,
}

#[derive(Debug, Deserialize)]
pub struct SgdMethod {
    pub label: String,
    pub budget_ms: f64,
    /// `wall` or `spin-updates`.
    #[serde(default = "default_sgd_clock")]
    pub clock: String,
    #[serde(default = "default_rate")]
    pub ns_per_update: f64,
    /// Log-spaced sampling times for the curve.
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_max_restarts")]
    pub max_restarts: usize,
}

fn parsed<'de, D, T>(d: D) -> std::result::Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: fmt::Display,
{
    String::deserialize(d)?.parse().map_err(de::Error::custom)
}

fn parsed_list<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: fmt::Display,
{
    Vec::<String>::deserialize(d)?.iter().map(|s| s.parse().map_err(de::Error::custom)).collect()
}

fn yes() -> bool {
    true
}
fn default_chain_strength() -> f64 {
    2.0
}
fn default_iterations() -> usize {
    128
}
fn default_runs() -> usize {
    1
}
fn default_t_p() -> f64 {
    10.0
}
fn default_t_ro() -> f64 {
    0.2
}
fn default_t_a() -> f64 {
    0.1
}
fn default_rate() -> f64 {
    33.0
}
fn default_m() -> usize {
    16
}
fn default_defects() -> String {
    "none".into()
}
fn default_sgd_clock() -> String {
    "wall".into()
}
fn default_points() -> usize {
    16
}
fn default_max_restarts() -> usize {
    1 << 20
}

pub fn load(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
    let m: Manifest = toml::from_str(&text).map_err(|e| usage(format!("manifest {}: {e}", path.display())))?;
    m.check()?;
    Ok(m)
}

impl Manifest {
    fn seeds(&self) -> Vec<u64> {
        match (&self.instances.seeds, self.instances.count) {
            (Some(s), _) => s.clone(),
            (None, Some(c)) => (0..c as u64).collect(),
            (None, None) => (0..25).collect(),
        }
    }

    fn check(&self) -> Result<()> {
        let seeds = self.seeds();
        if seeds.is_empty() {
            return Err(usage("the study has no instances"));
        }
        if seeds.iter().collect::<HashSet<_>>().len() != seeds.len() {
            return Err(usage("instance seeds must be distinct"));
        }
        if let (Some(s), Some(c)) = (&self.instances.seeds, self.instances.count) {
            if s.len() != c {
                return Err(usage("instance count disagrees with the seed list"));
            }
        }
        if !matches!(self.instances.ensemble.as_str(), "pmj" | "ferro" | "tiles") {
            return Err(usage(format!("unknown ensemble '{}'", self.instances.ensemble)));
        }
        if self.methods.is_empty() {
            return Err(usage("the study has no methods"));
        }
        let mut labels = HashSet::new();
        for m in &self.methods {
            let l = m.label();
            if l.is_empty() || l.contains([',', '/', '\\', '\n']) {
                return Err(usage(format!("method label '{l}' must be a plain file name")));
            }
            if !labels.insert(l) {
                return Err(usage(format!("method label '{l}' is used twice")));
            }
        }
        Ok(())
    }
}

struct Instance {
    seed: u64,
    model: IsingModel,
    e0: GroundEstimate,
}

fn build_instances(m: &Manifest, seed: u64) -> Result<Vec<Instance>> {
    let spec = &m.instances;
    let topo = LatticeTopology::build(spec.kind, spec.l)?;
    let dist = if spec.ensemble == "tiles" {
        if spec.kind != LatticeKind::Cubic {
            return Err(usage("tile planting is only defined on the cubic lattice"));
        }
        Some(solve_tile_distribution(spec.target)?)
    } else {
        None
    };
    m.seeds()
        .par_iter()
        .map(|&s| {
            let (model, e0) = match spec.ensemble.as_str() {
                "tiles" => {
                    let inst = gen_tile_planted(spec.l, dist.as_ref().expect("tiles"), s)?;
                    let e = inst.planted.ground_energy;
                    (inst.model, GroundEstimate::planted(e))
                }
                other => {
                    let model = if other == "pmj" { gen_pm_j(&topo, s)? } else { gen_ferromagnet(&topo)? };
                    let e0 = estimate_e0(&model, &m.e0.budget, derive_seed(seed, 0xE0))?;
                    (model, e0)
                }
            };
            Ok(Instance { seed: s, model, e0 })
        })
        .collect()
}

/// Runs the study; returns the written files.
pub fn run(path: &Path, global_seed: u64, p: &Printer) -> Result<()> {
    let manifest = load(path)?;
    let seed = manifest.seed.unwrap_or(global_seed);
    let dir = path.parent().unwrap_or(Path::new(".")).join(&manifest.output_dir);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let instances = build_instances(&manifest, seed)?;
    let e0s: Vec<f64> = instances.iter().map(|i| i.e0.e0).collect();
    if let Some(bad) = e0s.iter().find(|e| !(**e < 0.0)) {
        bail!("ground estimate {bad} is not negative; relative error is undefined");
    }

    let mut e0_csv = String::from("seed,e0,provenance\n");
    for i in &instances {
        e0_csv.push_str(&format!("{},{:?},{}\n", i.seed, i.e0.e0, i.e0.provenance));
    }
    fs::write(dir.join("e0.csv"), e0_csv)?;

    let mut curves = Vec::new();
    let mut observed: Vec<f64> = Vec::new();
    for method in &manifest.methods {
        let t0 = Instant::now();
        let (mut curve, finals) = match method {
            Method::Lnls(m) => run_lnls(m, &instances, &e0s, seed)?,
            Method::Sa(m) => run_sa_method(m, &instances, &e0s, seed)?,
            Method::Sgd(m) => run_sgd_method(m, &instances, &e0s, seed)?,
        };
        curve.label = method.label().to_string();
        observed.extend(&finals);
        let file = dir.join(format!("{}.csv", curve.label));
        emit_report(std::slice::from_ref(&curve), ReportFormat::Csv, &file)?;
        let last = curve.points.last().copied();
        p.emit(json!({
            "method": curve.label,
            "file": file.display().to_string(),
            "final_median_r": last.map(|c| c.median_r),
            "final_time_ms": last.map(|c| c.time_ms),
            "elapsed_s": t0.elapsed().as_secs_f64(),
        }))?;
        curves.push(curve);
    }
    for (i, inst) in instances.iter().enumerate() {
        let per = observed.iter().skip(i).step_by(instances.len()).copied();
        check_dominance(inst.e0.e0, per).with_context(|| format!("instance seed {}", inst.seed))?;
    }
    let svg = dir.join("burn-down.svg");
    emit_report(&curves, ReportFormat::Svg, &svg)?;
    p.emit(json!({"plot": svg.display().to_string(), "instances": instances.len()}))
}

/// Best energy per instance for the E0 check, in instance order.
type Finals = Vec<f64>;

fn run_lnls(m: &LnlsMethod, instances: &[Instance], e0s: &[f64], seed: u64) -> Result<(AggregateCurve, Finals)> {
    let timing = timing_model(&TimingArgs {
        t_p: m.t_p,
        t_ro: m.t_ro,
        t_a: m.t_a,
        n_r: m.qpu_reads,
        network_overhead: m.network_overhead,
        ns_per_update: m.ns_per_update,
        clock: match m.clock.as_deref() {
            None => None,
            Some("qpu") => Some(ClockArg::Qpu),
            Some("spin-updates") => Some(ClockArg::SpinUpdates),
            Some(other) => return Err(usage(format!("unknown clock '{other}'"))),
        },
    })?;
    let spec = subsolver_spec(m.subsolver, m.sweeps, m.reads, m.chain_strength);
    let hw = if spec.kind.needs_embedding() {
        let args = HardwareArgs { m: m.m, defects: m.defects.clone(), defect_seed: m.defect_seed };
        Some(Arc::new(hardware::build(&args, seed)?))
    } else {
        None
    };
    let topo = instances[0].model.topology().expect("lattice instances").clone();
    let templates = regions(&topo, &m.shapes, m.rotations, &[], hw)?;
    let jobs: Vec<(usize, usize)> = (0..instances.len()).flat_map(|i| (0..m.runs).map(move |r| (i, r))).collect();
    let traces: Vec<BurnDownRecord> = jobs
        .par_iter()
        .map(|&(i, r)| {
            let mut cfg = LnlsConfig::new(templates.clone(), spec, derive_seed(seed ^ instances[i].seed, r as u64));
            cfg.timing = timing;
            cfg.variant = m.variant;
            cfg.max_iterations = m.max_iterations;
            cfg.e_target = f64::NEG_INFINITY;
            Ok(run_workflow_variant(&instances[i].model, &cfg)?.1)
        })
        .collect::<Result<_>>()?;
    let job_e0: Vec<f64> = jobs.iter().map(|&(i, _)| e0s[i]).collect();
    let curve = aggregate_median(&traces, &job_e0, TimeAxis::Simulated)?;
    let mut finals = vec![f64::INFINITY; instances.len()];
    for (&(i, _), t) in jobs.iter().zip(&traces) {
        finals[i] = finals[i].min(t.final_energy());
    }
    Ok((curve, finals))
}

fn run_sa_method(m: &SaMethod, instances: &[Instance], e0s: &[f64], seed: u64) -> Result<(AggregateCurve, Finals)> {
    if m.sweeps.is_empty() {
        return Err(usage(format!("method {} lists no sweep counts", m.label)));
    }
    let mut points = Vec::new();
    let mut finals = vec![f64::INFINITY; instances.len()];
    for &s in &m.sweeps {
        let cells: Vec<(f64, f64)> = instances
            .par_iter()
            .map(|inst| {
                let t0 = Instant::now();
                let r = run_sa(
                    &inst.model,
                    &SaRun::new(&inst.model, m.samples, s, derive_seed(seed ^ inst.seed, s as u64)),
                )?;
                Ok((r.energy, t0.elapsed().as_secs_f64() * 1e3))
            })
            .collect::<Result<_>>()?;
        let r = cells.iter().zip(e0s).map(|(c, &e0)| relative_error(e0, c.0)).collect::<lnls_core::Result<Vec<_>>>()?;
        for (f, c) in finals.iter_mut().zip(&cells) {
            *f = f.min(c.0);
        }
        let walls: Vec<f64> = cells.iter().map(|c| c.1).collect();
        let (med, lo, hi) = median_ci(&r).expect("non-empty");
        let (wall, _, _) = median_ci(&walls).expect("non-empty");
        points.push(CurvePoint { time_ms: wall, median_r: med, ci_low: lo, ci_high: hi });
    }
    Ok((AggregateCurve { label: String::new(), points }, finals))
}

fn run_sgd_method(m: &SgdMethod, instances: &[Instance], e0s: &[f64], seed: u64) -> Result<(AggregateCurve, Finals)> {
    let clock = match m.clock.as_str() {
        "wall" => BaselineClock::Wall,
        "spin-updates" => BaselineClock::SpinUpdates { ns_per_update: m.ns_per_update },
        other => return Err(usage(format!("unknown clock '{other}'"))),
    };
    if !(m.budget_ms > 0.0) || m.points < 2 {
        return Err(usage(format!("method {} needs a positive budget and at least two points", m.label)));
    }
    let traces: Vec<BurnDownRecord> = instances
        .par_iter()
        .map(|inst| {
            Ok(sgd_burn_down(&inst.model, m.budget_ms, clock, derive_seed(seed ^ inst.seed, 7), m.max_restarts)?)
        })
        .collect::<Result<_>>()?;
    let first =
        traces.iter().filter_map(|t| t.points.get(1).map(|p| p.sim_time_ms)).fold(f64::INFINITY, f64::min).max(1e-6);
    let (a, b) = (first.ln(), m.budget_ms.max(first).ln());
    let times: Vec<f64> = (0..m.points).map(|k| (a + (b - a) * k as f64 / (m.points - 1) as f64).exp()).collect();
    let curve = sample_curves(&traces, e0s, &times, TimeAxis::Simulated)?;
    Ok((curve, traces.iter().map(|t| t.final_energy()).collect()))
}
