//! `cosoc` — temporal blog-network analysis pipeline.
//!
//! Subcommands: `ingest`, `distances`, `semdist`, `propensity`,
//! `diffusion extract|stats`, `synth`, `report`. Exit codes: 0 success, 1
//! validation error, 2 I/O error.

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod manifest;
mod run;

#[derive(Parser)]
#[command(name = "cosoc", version, about = "Temporal blog-network analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and index an event stream.
    Ingest(IngestArgs),
    /// Pairwise social or detachment-based distances at a cut-off day.
    Distances(DistancesArgs),
    /// Pairwise semantic distances at a cut-off day.
    Semdist(SemdistArgs),
    /// Link-creation propensity curves over rolling windows.
    Propensity(PropensityArgs),
    /// Diffusion-subgraph extraction and statistics.
    #[command(subcommand)]
    Diffusion(DiffusionCommand),
    /// Generate a synthetic event corpus.
    Synth(SynthArgs),
    /// Corpus summary report.
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum DiffusionCommand {
    /// Write every non-trivial diffusion subgraph.
    Extract(ExtractArgs),
    /// Size, attention or edge-range statistics.
    Stats(DiffusionStatsArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Line-delimited event records.
    #[arg(long)]
    events: PathBuf,
    /// JSON manifest declaring the observation window (and optionally the
    /// curated term list).
    #[arg(long)]
    manifest: PathBuf,
    /// Index file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DistanceKind {
    Social,
    Detachment,
}

#[derive(Args)]
struct DistancesArgs {
    #[arg(long)]
    index: PathBuf,
    /// Aggregation cut-off day.
    #[arg(long)]
    cutoff: u32,
    #[arg(long, value_enum)]
    kind: DistanceKind,
    /// CSV of `src,dst` pairs to evaluate.
    #[arg(long, conflicts_with = "all", required_unless_present = "all")]
    pairs: Option<PathBuf>,
    /// Evaluate every ordered pair.
    #[arg(long)]
    all: bool,
    /// Output CSV (`src,dst,distance`, `inf` for unreachable).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SemdistArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    cutoff: u32,
    /// CSV of `i,j` pairs to evaluate.
    #[arg(long, conflicts_with = "all", required_unless_present = "all")]
    pairs: Option<PathBuf>,
    /// Evaluate every unordered pair.
    #[arg(long)]
    all: bool,
    /// Output CSV (`i,j,delta` with `NA` when undefined).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PropensityKind {
    Social,
    Detachment,
    Semantic,
    #[value(name = "2d")]
    TwoD,
}

#[derive(Args)]
struct PropensityArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long, value_enum)]
    kind: PropensityKind,
    /// Initialization cut-off (first window starts the next day).
    #[arg(long, default_value_t = 60)]
    t0: u32,
    /// Window length in days.
    #[arg(long = "T", default_value_t = 7)]
    window_len: u32,
    /// Number of windows.
    #[arg(long, default_value_t = 8)]
    windows: u32,
    /// Largest exact social-distance bin.
    #[arg(long = "max-d", default_value_t = 8)]
    max_d: u32,
    /// Semantic bin width, decimal or fraction (default 0.1; 0.2 for the
    /// 2-D grid).
    #[arg(long = "delta-bin")]
    delta_bin: Option<String>,
    /// Detachment bin edges, comma-separated (default: powers of two 1..256).
    #[arg(long = "bin-edges")]
    bin_edges: Option<String>,
    /// Per-window CSV; the cross-window summary lands next to it as
    /// `<out stem>.summary.csv`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    index: PathBuf,
    /// Output directory (subgraphs.jsonl, counts.json, run.json).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StatsKind {
    Sizes,
    Attention,
    Edgerange,
}

#[derive(Args)]
struct DiffusionStatsArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long, value_enum)]
    kind: StatsKind,
    /// Quantile count (default: 8 for attention, 5 for edgerange).
    #[arg(long)]
    quantiles: Option<u32>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Flat key-value generator config.
    #[arg(long)]
    config: PathBuf,
    /// Event stream to write; the window manifest lands next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    index: PathBuf,
    /// Directory holding (and receiving) the run's artifacts.
    #[arg(long)]
    outputs: PathBuf,
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match &cli.command {
        Command::Ingest(args) => run::run_ingest(args, argv),
        Command::Distances(args) => run::run_distances(args, argv),
        Command::Semdist(args) => run::run_semdist(args, argv),
        Command::Propensity(args) => run::run_propensity(args, argv),
        Command::Diffusion(DiffusionCommand::Extract(args)) => {
            run::run_diffusion_extract(args, argv)
        }
        Command::Diffusion(DiffusionCommand::Stats(args)) => {
            run::run_diffusion_stats(args, argv)
        }
        Command::Synth(args) => run::run_synth(args, argv),
        Command::Report(args) => run::run_report(args, argv),
    };
    match result {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(exit_code(&err));
        }
    }
}

/// 2 for I/O failures, 1 for anything else (validation).
fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<cosoc_core::Error>() {
            return if core.is_io() { 2 } else { 1 };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 2;
        }
        if let Some(csv_err) = cause.downcast_ref::<csv::Error>() {
            if csv_err.is_io_error() {
                return 2;
            }
        }
    }
    1
}
