use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use lnls_core::bench::{
    emit_report, estimate_e0, read_csv, read_ground_estimate, relative_error, write_ground_estimate, GroundEstimate,
    ReportFormat,
};
use lnls_core::embedding::{make_origin_embeddings, read_embedding, write_embedding, HardwareGraph};
use lnls_core::generators::{gen_ferromagnet, gen_pm_j, gen_tile_planted, solve_tile_distribution};
use lnls_core::ising::{read_instance, read_planted, write_instance, write_planted, InstanceMeta, IsingModel};
use lnls_core::lattice::{LatticeKind, LatticeTopology, SubspaceShape};
use lnls_core::lnls::{
    run_workflow_variant, BurnDownRecord, ClockKind, LnlsConfig, QpuTiming, RegionTemplate, SubsolverSpec, TimingModel,
};
use lnls_core::samplers::{run_sa, run_sgd, SaRun};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::*;
use crate::{hardware, study, usage};

pub struct Printer {
    pub format: OutputFormat,
}

impl Printer {
    /// One record: a JSON object per line, or `key: value` lines.
    pub fn emit(&self, record: Value) -> Result<()> {
        let mut out = io::stdout().lock();
        match self.format {
            OutputFormat::Json => writeln!(out, "{record}")?,
            OutputFormat::Text => {
                if let Value::Object(map) = record {
                    for (k, v) in map {
                        match v {
                            Value::String(s) => writeln!(out, "{k}: {s}")?,
                            other => writeln!(out, "{k}: {other}")?,
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn dispatch(cli: Cli) -> Result<()> {
    rayon::ThreadPoolBuilder::new().num_threads(cli.threads as usize).build_global().context("starting worker pool")?;
    let p = Printer { format: cli.format };
    let seed = cli.seed;
    match cli.command {
        Command::Generate(a) => generate(&a, seed, &p),
        Command::Lattice(LatticeCommand::Export { kind, l, out }) => {
            let topo = LatticeTopology::build(kind, l)?;
            write_to(out.as_deref(), |w| Ok(topo.export(w)?))?;
            p.emit(json!({"kind": kind.name(), "scale": l, "vertices": topo.num_vertices(), "edges": topo.graph().num_edges()}))
        }
        Command::Embed(EmbedCommand::Make { kind, shape, hardware, out }) => {
            embed_make(kind, &shape, &hardware, &out, seed, &p)
        }
        Command::Embed(EmbedCommand::Validate { embedding, hardware }) => {
            embed_validate(&embedding, &hardware, seed, &p)
        }
        Command::SolveSa(a) => solve_sa(&a, seed, &p),
        Command::SolveGreedy(a) => solve_greedy(&a, seed, &p),
        Command::SolveLnls(a) => solve_lnls(&a, seed, &p),
        Command::EstimateE0(a) => estimate(&a, seed, &p),
        Command::Bench(a) => study::run(&a.manifest, seed, &p),
        Command::Report(a) => report(&a, &p),
    }
}

/// Writes through a buffer to `path`, or to stdout.
pub fn write_to(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

pub fn sidecar(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn load_instance(path: &Path) -> Result<(IsingModel, InstanceMeta)> {
    let f = File::open(path).with_context(|| format!("opening instance {}", path.display()))?;
    read_instance(BufReader::new(f)).with_context(|| format!("reading instance {}", path.display()))
}

fn load_e0(path: &Path) -> Result<GroundEstimate> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_ground_estimate(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn generate(a: &GenerateArgs, seed: u64, p: &Printer) -> Result<()> {
    let topo = LatticeTopology::build(a.kind, a.l)?;
    let (model, meta, planted) = match a.ensemble {
        Ensemble::Pmj => (gen_pm_j(&topo, seed)?, InstanceMeta { ensemble: "pmj".into(), seed: Some(seed) }, None),
        Ensemble::Ferro => (gen_ferromagnet(&topo)?, InstanceMeta { ensemble: "ferro".into(), seed: None }, None),
        Ensemble::Tiles => {
            if a.kind != LatticeKind::Cubic {
                return Err(usage("tile planting is only defined on the cubic lattice"));
            }
            if a.out.is_none() {
                return Err(usage("planted instances need --out for the planted-state sidecar"));
            }
            let dist = solve_tile_distribution(a.target)?;
            let inst = gen_tile_planted(a.l, &dist, seed)?;
            let meta = InstanceMeta { ensemble: format!("tiles{}", a.target), seed: Some(seed) };
            (inst.model, meta, Some(inst.planted))
        }
    };
    write_to(a.out.as_deref(), |w| Ok(write_instance(&model, &meta, w)?))?;
    let mut rec = json!({
        "ensemble": meta.ensemble,
        "kind": a.kind.name(),
        "scale": a.l,
        "vertices": model.num_vertices(),
        "couplers": model.graph().num_edges(),
    });
    if let (Some(pl), Some(out)) = (&planted, &a.out) {
        let side = sidecar(out, "planted");
        write_to(Some(&side), |w| Ok(write_planted(&model, pl, w)?))?;
        rec["ground_energy"] = json!(pl.ground_energy);
        rec["planted"] = json!(side.display().to_string());
    }
    if a.out.is_some() {
        p.emit(rec)?;
    }
    Ok(())
}

fn embed_make(
    kind: LatticeKind,
    shape: &SubspaceShape,
    hw: &HardwareArgs,
    out: &Path,
    seed: u64,
    p: &Printer,
) -> Result<()> {
    let hardware = hardware::build(hw, seed)?;
    let embs = make_origin_embeddings(&hardware, kind, shape)?;
    let mut files = Vec::new();
    for (i, e) in embs.iter().enumerate() {
        let path = PathBuf::from(format!("{}-{i}.emb", out.display()));
        write_to(Some(&path), |w| Ok(write_embedding(e, &hardware, w)?))?;
        files.push(json!({
            "file": path.display().to_string(),
            "shape": e.shape().to_string(),
            "variables": e.num_variables(),
            "active": e.active_variables().len(),
            "vacancies": e.vacancies().len(),
            "greedy_cover": e.used_greedy_cover(),
        }));
    }
    p.emit(json!({
        "hardware_qubits": hardware.yielded_qubits().len(),
        "hardware_couplers": hardware.yielded_couplers().len(),
        "embeddings": files,
    }))
}

fn embed_validate(path: &Path, hw: &HardwareArgs, seed: u64, p: &Printer) -> Result<()> {
    let hardware = hardware::build(hw, seed)?;
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let e = read_embedding(BufReader::new(f), &hardware).with_context(|| format!("reading {}", path.display()))?;
    e.validate(&hardware).with_context(|| format!("{} is not a valid embedding", path.display()))?;
    p.emit(json!({
        "valid": true,
        "shape": e.shape().to_string(),
        "variables": e.num_variables(),
        "active": e.active_variables().len(),
        "vacancies": e.vacancies().len(),
    }))
}

fn relative(e0: &Option<GroundEstimate>, energy: f64) -> Result<Value> {
    Ok(match e0 {
        Some(g) => json!(relative_error(g.e0, energy)?),
        None => Value::Null,
    })
}

fn solve_sa(a: &SolveSaArgs, seed: u64, p: &Printer) -> Result<()> {
    let (model, _) = load_instance(&a.instance)?;
    let e0 = a.e0.as_deref().map(load_e0).transpose()?;
    let run = SaRun::new(&model, a.samples, a.sweeps, seed);
    let t0 = Instant::now();
    let r = run_sa(&model, &run)?;
    let wall = t0.elapsed().as_secs_f64() * 1e3;
    p.emit(json!({
        "energy": r.energy,
        "relative_error": relative(&e0, r.energy)?,
        "samples": a.samples,
        "sweeps": a.sweeps,
        "t_max": run.schedule.t_max,
        "t_min": run.schedule.t_min,
        "spin_updates": r.spin_updates,
        "wall_time_ms": wall,
    }))
}

fn solve_greedy(a: &SolveGreedyArgs, seed: u64, p: &Printer) -> Result<()> {
    let (model, _) = load_instance(&a.instance)?;
    let e0 = a.e0.as_deref().map(load_e0).transpose()?;
    let t0 = Instant::now();
    let r = run_sgd(&model, a.restarts, seed)?;
    let wall = t0.elapsed().as_secs_f64() * 1e3;
    p.emit(json!({
        "energy": r.energy,
        "relative_error": relative(&e0, r.energy)?,
        "restarts": a.restarts,
        "flips": r.flips,
        "wall_time_ms": wall,
    }))
}

pub fn timing_model(t: &TimingArgs) -> Result<TimingModel> {
    let tm = TimingModel {
        qpu: QpuTiming { t_p: t.t_p, t_ro: t.t_ro, t_a: t.t_a, network: t.network_overhead },
        ns_per_update: t.ns_per_update,
        clock_override: t.clock.map(|c| match c {
            ClockArg::Qpu => ClockKind::Qpu,
            ClockArg::SpinUpdates => ClockKind::SpinUpdates,
        }),
        qpu_reads: t.n_r,
    };
    tm.validate().map_err(|e| usage(e.to_string()))?;
    Ok(tm)
}

/// Region templates for a lattice model: embedded if the subsolver needs
/// hardware or embedding files are given, plain shapes otherwise.
pub fn regions(
    topo: &LatticeTopology,
    shapes: &[SubspaceShape],
    rotations: bool,
    embedding_files: &[PathBuf],
    hardware: Option<Arc<HardwareGraph>>,
) -> Result<Vec<RegionTemplate>> {
    let mut out = Vec::new();
    if let Some(hw) = hardware {
        for path in embedding_files {
            let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let e = read_embedding(BufReader::new(f), &hw)?;
            e.validate(&hw).with_context(|| format!("{} is not a valid embedding", path.display()))?;
            out.push(RegionTemplate::from_embedding(topo, Arc::new(e), Arc::clone(&hw))?);
        }
        for shape in shapes {
            for e in make_origin_embeddings(&hw, topo.kind(), shape)? {
                if rotations || e.shape() == *shape {
                    out.push(RegionTemplate::from_embedding(topo, Arc::new(e), Arc::clone(&hw))?);
                }
            }
        }
    } else {
        for shape in shapes {
            let list = if rotations { shape.rotations() } else { vec![*shape] };
            for s in list {
                out.push(RegionTemplate::from_shape(topo, &s)?);
            }
        }
    }
    Ok(out)
}

pub fn subsolver_spec(
    kind: lnls_core::lnls::SubsolverKind,
    sweeps: Option<usize>,
    reads: Option<usize>,
    chain_strength: f64,
) -> SubsolverSpec {
    let mut s = SubsolverSpec::of_kind(kind);
    if let Some(v) = sweeps {
        s.sweeps = v;
    }
    if let Some(v) = reads {
        s.reads = v;
    }
    s.chain_strength = chain_strength;
    s
}

fn solve_lnls(a: &SolveLnlsArgs, seed: u64, p: &Printer) -> Result<()> {
    let (model, _) = load_instance(&a.instance)?;
    let topo = model.topology().ok_or_else(|| usage("solve-lnls needs a lattice instance"))?.clone();
    let e0 = a.e0.as_deref().map(load_e0).transpose()?;
    let spec = subsolver_spec(a.subsolver, a.sweeps, a.reads, a.chain_strength);
    let hw = if spec.kind.needs_embedding() || !a.embedding.is_empty() {
        Some(Arc::new(hardware::build(&a.hardware, seed)?))
    } else {
        None
    };
    let templates = regions(&topo, &a.shapes, !a.no_rotations, &a.embedding, hw)?;
    let mut cfg = LnlsConfig::new(templates, spec, seed);
    cfg.timing = timing_model(&a.timing)?;
    cfg.variant = a.variant;
    cfg.max_iterations = a.max_iterations;
    if let Some(t) = a.e_target {
        cfg.e_target = t;
    }
    let (_, rec) = run_workflow_variant(&model, &cfg)?;
    write_to(a.out.as_deref(), |w| write_burn_down(&rec, e0.as_ref().map(|g| g.e0), w))?;
    if a.out.is_some() {
        let last = rec.points.last().expect("initial point");
        p.emit(json!({
            "iterations": rec.iterations(),
            "energy": last.energy,
            "relative_error": relative(&e0, last.energy)?,
            "sim_time_ms": last.sim_time_ms,
            "wall_time_ms": last.wall_time_ms,
            "driver_overhead_ms_per_iteration": rec.driver_overhead_ms(),
        }))?;
    }
    Ok(())
}

pub fn write_burn_down(rec: &BurnDownRecord, e0: Option<f64>, w: &mut dyn Write) -> Result<()> {
    match e0 {
        Some(_) => writeln!(w, "iteration,energy,relative_error,sim_time_ms,wall_time_ms")?,
        None => writeln!(w, "iteration,energy,sim_time_ms,wall_time_ms")?,
    }
    for pt in &rec.points {
        match e0 {
            Some(e0) => writeln!(
                w,
                "{},{:?},{:?},{:?},{:?}",
                pt.iteration,
                pt.energy,
                relative_error(e0, pt.energy)?,
                pt.sim_time_ms,
                pt.wall_time_ms
            )?,
            None => writeln!(w, "{},{:?},{:?},{:?}", pt.iteration, pt.energy, pt.sim_time_ms, pt.wall_time_ms)?,
        }
    }
    Ok(())
}

pub fn parse_budget(items: &[String]) -> Result<Vec<(usize, usize)>> {
    items
        .iter()
        .map(|s| {
            let (n, sw) = s.split_once(':').ok_or_else(|| usage(format!("budget '{s}' is not n:S")))?;
            let n: usize = n.parse().map_err(|_| usage(format!("bad sample count in '{s}'")))?;
            let sw: usize = sw.parse().map_err(|_| usage(format!("bad sweep count in '{s}'")))?;
            if n == 0 || sw == 0 {
                return Err(usage(format!("budget '{s}' must be positive")));
            }
            Ok((n, sw))
        })
        .collect()
}

fn estimate(a: &EstimateE0Args, seed: u64, p: &Printer) -> Result<()> {
    let budget = parse_budget(&a.budget)?;
    let results: Vec<Result<(PathBuf, GroundEstimate)>> = a
        .instances
        .par_iter()
        .map(|path| {
            let (model, _) = load_instance(path)?;
            let planted = sidecar(path, "planted");
            let est = if a.planted && planted.exists() {
                let f = File::open(&planted)?;
                GroundEstimate::planted(read_planted(&model, BufReader::new(f))?.ground_energy)
            } else {
                estimate_e0(&model, &budget, seed)?
            };
            let out = sidecar(path, "e0");
            write_to(Some(&out), |w| Ok(write_ground_estimate(&est, w)?))?;
            Ok((out, est))
        })
        .collect();
    for r in results {
        let (out, est) = r?;
        p.emit(json!({"file": out.display().to_string(), "e0": est.e0, "provenance": est.provenance.to_string()}))?;
    }
    Ok(())
}

fn report(a: &ReportArgs, p: &Printer) -> Result<()> {
    let kind = match a.to {
        Some(k) => k,
        None => match a.out.extension().and_then(|e| e.to_str()) {
            Some("csv") => ReportKind::Csv,
            Some("svg") => ReportKind::Svg,
            _ => return Err(usage("cannot infer the report type from the output name; pass --to")),
        },
    };
    let mut curves = Vec::new();
    for path in &a.inputs {
        let text = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        curves.extend(read_csv(&text[..]).with_context(|| format!("parsing {}", path.display()))?);
    }
    let labels: Vec<&str> = curves.iter().map(|c| c.label.as_str()).collect();
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            bail!("series '{l}' appears in more than one input");
        }
    }
    let format = match kind {
        ReportKind::Csv => ReportFormat::Csv,
        ReportKind::Svg => ReportFormat::Svg,
    };
    emit_report(&curves, format, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    p.emit(json!({"file": a.out.display().to_string(), "series": labels}))
}
