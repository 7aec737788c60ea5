//! `voltype`: experiments on volume types of point configurations.
//!
//! Every subcommand takes an optional JSON config (`--config`) whose fields can be
//! overridden by flags. Tables go to `--out` (or stdout) as CSV; the JSON summary,
//! which echoes the resolved config, goes to `--summary`, next to `--out`, or stderr.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use config::parse_json;

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config, or input files.
    Usage(String),
    /// Valid input the mathematics rejects (degenerate, over budget, ...).
    Domain(String),
    Internal(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Domain(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Domain(m) => write!(f, "error: {m}"),
            Failure::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<voltype_core::Error> for Failure {
    fn from(e: voltype_core::Error) -> Self {
        if e.is_domain() {
            Failure::Domain(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "voltype",
    version,
    about = "Volume types of point configurations: counting, box counting, pair statistics, spectral checks"
)]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "VOLTYPE_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Volume types of tuples drawn from a point file.
    Voltype(VoltypeArgs),
    /// Decide whether two configurations differ by a unimodular map.
    OrbitCheck(OrbitArgs),
    /// Canonical chart coordinates of a configuration and the embedding's Jacobian.
    Canonical(CanonicalArgs),
    /// Distinct volume types of sharpness sets across q.
    Sharpness(SharpnessArgs),
    /// Box counts of volume types in chart coordinates.
    Positivity(BoxArgs),
    /// Box counts of chain volumes.
    Chain(BoxArgs),
    /// Pair statistic eps^{-n} P(|Phi(x) - Phi(y)| <= eps).
    Pairstat(PairArgs),
    /// Littlewood-Paley scaling of a measure on a periodic grid.
    Spectral(SpectralArgs),
    /// Write the centers (or samples) of a set as a point file.
    GenSet(GenSetArgs),
}

#[derive(Args, Serialize)]
pub struct Common {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// CSV output (stdout when absent).
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// JSON summary output (defaults to the CSV path with a .json extension).
    #[arg(long)]
    #[serde(skip)]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct VoltypeArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    /// Headerless CSV of points, one per row.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Tuple size; without it the whole file is one configuration.
    #[arg(long)]
    pub k: Option<usize>,
    /// `all` for every increasing k-subset, or a CSV of 0-based indices.
    #[arg(long)]
    pub tuples: Option<String>,
    /// Number of random k-subsets instead.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Serialize)]
pub struct OrbitArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// JSON output (stdout when absent).
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Serialize)]
pub struct CanonicalArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// JSON output (stdout when absent).
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Smallest |t| accepted as inside the chart.
    #[arg(long)]
    pub floor: Option<f64>,
    /// Relative finite-difference step for the Jacobian.
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Args, Serialize)]
pub struct SharpnessArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    /// Comma-separated q values.
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<u32>>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Rounding grid for deduplication.
    #[arg(long)]
    pub delta: Option<f64>,
    /// `exhaustive` or `sampled`.
    #[arg(long)]
    pub mode: Option<String>,
    /// Tuples per q in sampled mode.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub budget: Option<u64>,
    /// Rounding grids for the sensitivity sweep on the smallest q.
    #[arg(long, value_delimiter = ',')]
    pub delta_sweep: Option<Vec<f64>>,
}

#[derive(Args, Serialize)]
pub struct BoxArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    /// Set description as JSON, e.g. '{"kind":"annulus_uniform","d":2,"n":100000}'.
    #[arg(long, value_parser = parse_json)]
    pub set: Option<Value>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of sampled k-tuples.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated box sizes.
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
}

#[derive(Args, Serialize)]
pub struct PairArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    #[arg(long, value_parser = parse_json)]
    pub set: Option<Value>,
    #[arg(long)]
    pub k: Option<usize>,
    /// `volume_chart` or `chain`.
    #[arg(long)]
    pub map: Option<String>,
    /// Comma-separated, strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long)]
    pub pairs: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Serialize)]
pub struct SpectralArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    /// Measure as JSON: uniform, cantor, or {"kind":"set","set":{..}}.
    #[arg(long, value_parser = parse_json)]
    pub measure: Option<Value>,
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[arg(long)]
    pub j_min: Option<u32>,
    #[arg(long)]
    pub j_max: Option<u32>,
    #[arg(long)]
    pub period: Option<f64>,
    /// Frostman exponent (defaults to the measure's own).
    #[arg(long)]
    pub s: Option<f64>,
    /// Slack allowed above the predicted slopes.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Args, Serialize)]
pub struct GenSetArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    #[arg(long, value_parser = parse_json)]
    pub set: Option<Value>,
    /// Write this many samples of the set's measure instead of its centers.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(workers) = cli.workers {
        if workers == 0 {
            return Err(Failure::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Failure::Internal(e.to_string()))?;
    }
    match cli.command {
        Command::Voltype(a) => commands::voltype(&a),
        Command::OrbitCheck(a) => commands::orbit_check(&a),
        Command::Canonical(a) => commands::canonical(&a),
        Command::Sharpness(a) => commands::sharpness(&a),
        Command::Positivity(a) => commands::box_count(&a, commands::BoxMap::Chart),
        Command::Chain(a) => commands::box_count(&a, commands::BoxMap::Chain),
        Command::Pairstat(a) => commands::pairstat(&a),
        Command::Spectral(a) => commands::spectral(&a),
        Command::GenSet(a) => commands::gen_set(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(failure)) => {
            eprintln!("{failure}");
            ExitCode::from(failure.exit_code())
        }
        Err(_) => ExitCode::from(3),
    }
}
