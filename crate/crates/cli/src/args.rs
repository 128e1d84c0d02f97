use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lnls_core::lattice::{LatticeKind, SubspaceShape};
use lnls_core::lnls::{SubsolverKind, Variant};

#[derive(Debug, Parser)]
#[command(name = "lnls", version, about = "Large-neighborhood local search for lattice Ising problems")]
pub struct Cli {
    /// Base seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for instance-level parallelism.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: u64,
    /// Summary output on stdout.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a benchmark instance.
    Generate(GenerateArgs),
    /// Lattice utilities.
    #[command(subcommand)]
    Lattice(LatticeCommand),
    /// Origin embeddings on Pegasus hardware.
    #[command(subcommand)]
    Embed(EmbedCommand),
    /// Simulated annealing on a whole instance.
    SolveSa(SolveSaArgs),
    /// Steepest greedy descent with restarts.
    SolveGreedy(SolveGreedyArgs),
    /// Large-neighborhood local search.
    SolveLnls(Box<SolveLnlsArgs>),
    /// Ground-energy estimate sidecar for each instance.
    EstimateE0(EstimateE0Args),
    /// Run a study described by a TOML manifest.
    Bench(BenchArgs),
    /// Combine aggregate CSV files into a report.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Ensemble {
    /// Couplers uniform on {-1, +1}.
    Pmj,
    /// All couplers -1.
    Ferro,
    /// Tile-planted cubic instance.
    Tiles,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub kind: LatticeKind,
    #[arg(long = "L", visible_alias = "scale")]
    pub l: usize,
    #[arg(long, value_enum)]
    pub ensemble: Ensemble,
    /// Energy per spin of the planted ground state (tiles only).
    #[arg(long, default_value_t = -1.8, allow_negative_numbers = true)]
    pub target: f64,
    /// Instance file; stdout if absent. Planted instances also write
    /// `<out>.planted`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum LatticeCommand {
    /// Write vertices and edges with coordinates.
    Export {
        #[arg(long)]
        kind: LatticeKind,
        #[arg(long = "L", visible_alias = "scale")]
        l: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Clone)]
pub struct HardwareArgs {
    /// Pegasus size P[m].
    #[arg(long, default_value_t = 16)]
    pub m: usize,
    /// `none`, `advantage` (random defects at Advantage yield rates) or a
    /// file of `qubit <coord>` / `coupler <coord> <coord>` lines.
    #[arg(long, default_value = "none")]
    pub defects: String,
    /// Seed for random defects; the global seed if absent.
    #[arg(long)]
    pub defect_seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum EmbedCommand {
    /// Build defect-trimmed origin embeddings, one file per rotation.
    Make {
        #[arg(long)]
        kind: LatticeKind,
        #[arg(long)]
        shape: SubspaceShape,
        #[command(flatten)]
        hardware: HardwareArgs,
        /// Output prefix; files are `<prefix>-<i>.emb`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check an embedding file against the hardware.
    Validate {
        #[arg(long)]
        embedding: PathBuf,
        #[command(flatten)]
        hardware: HardwareArgs,
    },
}

#[derive(Debug, Args)]
pub struct SolveSaArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    #[arg(long, default_value_t = 1024)]
    pub sweeps: usize,
    /// Ground-energy sidecar for the relative error.
    #[arg(long)]
    pub e0: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveGreedyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    #[arg(long)]
    pub e0: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClockArg {
    Qpu,
    SpinUpdates,
}

#[derive(Debug, Args, Clone)]
pub struct TimingArgs {
    /// Programming time per call, ms.
    #[arg(long, default_value_t = 10.0)]
    pub t_p: f64,
    /// Readout time per read, ms.
    #[arg(long, default_value_t = 0.2)]
    pub t_ro: f64,
    /// Anneal time per read, ms.
    #[arg(long, default_value_t = 0.1)]
    pub t_a: f64,
    /// Reads charged per call on the QPU clock; the subsolver's reads if absent.
    #[arg(long)]
    pub n_r: Option<usize>,
    /// Constant per-call overhead, ms.
    #[arg(long, default_value_t = 0.0)]
    pub network_overhead: f64,
    #[arg(long, default_value_t = 33.0)]
    pub ns_per_update: f64,
    /// Clock for every subsolver; by default QPU time for programmed kinds and
    /// spin-update time otherwise.
    #[arg(long, value_enum)]
    pub clock: Option<ClockArg>,
}

#[derive(Debug, Args)]
pub struct SolveLnlsArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Subspace shape (`AxBxC`, `niceM`, `fabricM`); repeatable.
    #[arg(long = "shape", required_unless_present = "embedding")]
    pub shapes: Vec<SubspaceShape>,
    /// Use only the given orientation of each cuboid.
    #[arg(long)]
    pub no_rotations: bool,
    /// Origin embedding files; repeatable. Built from the shapes if absent.
    #[arg(long)]
    pub embedding: Vec<PathBuf>,
    #[arg(long, default_value = "sa")]
    pub subsolver: SubsolverKind,
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub reads: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    pub chain_strength: f64,
    #[command(flatten)]
    pub timing: TimingArgs,
    #[command(flatten)]
    pub hardware: HardwareArgs,
    #[arg(long, default_value = "default")]
    pub variant: Variant,
    #[arg(long, allow_negative_numbers = true)]
    pub e_target: Option<f64>,
    #[arg(long, default_value_t = 128)]
    pub max_iterations: usize,
    #[arg(long)]
    pub e0: Option<PathBuf>,
    /// Burn-down CSV; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateE0Args {
    /// Instance files; repeatable.
    #[arg(long = "instance", required = true)]
    pub instances: Vec<PathBuf>,
    /// SA runs as `n:S`; repeatable.
    #[arg(long, default_value = "4:262144")]
    pub budget: Vec<String>,
    /// Use the `<instance>.planted` sidecar when present.
    #[arg(long)]
    pub planted: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    Csv,
    Svg,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Aggregate CSV files; repeatable.
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Report type; inferred from the output extension if absent.
    #[arg(long, value_enum)]
    pub to: Option<ReportKind>,
}
