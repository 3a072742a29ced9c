//! Command-line front end: every capability of the laboratory as a
//! reproducible, scriptable subcommand with machine-readable output.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure, 4 I/O error.
//! Outputs are byte-identical for identical inputs and seeds, independent of
//! the thread count.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

#[derive(Parser)]
#[command(
    name = "hermite-lab",
    version,
    about = "Hermite ranks, exact fractional Gaussian noise, perturbation scans, \
             and scaling-regime experiments",
    arg_required_else_help = true
)]
struct Cli {
    /// Worker threads for replicate-parallel work (default: all cores).
    /// Results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hermite expansion of a transform, with rank metadata.
    Expand(ExpandArgs),
    /// Hermite and power rank of a transform; fails if they disagree.
    Rank(RankArgs),
    /// Zero-set scan of the first coefficient under shift/scale/affine maps.
    Scan(ScanArgs),
    /// Sample exact fractional Gaussian noise paths.
    Fgn(FgnArgs),
    /// Run a scaling-regime experiment from a JSON description.
    Regime(RegimeArgs),
    /// Summarize a directory of regime results as a markdown table.
    Report(ReportArgs),
}

/// Transform description: inline JSON or @path to a JSON file.
#[derive(Args)]
struct SpecArg {
    /// e.g. `'{"base":{"kind":"poly","params":[0,0,1]}}'` or @spec.json
    spec: String,
}

#[derive(Args)]
struct ExpandArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Truncation order of the expansion.
    #[arg(long, default_value_t = hermite_lab::DEFAULT_TRUNCATION)]
    order: usize,
    /// Quadrature nodes (default: per-transform, 2000 for indicators).
    #[arg(long)]
    nodes: Option<usize>,
    /// Relative tolerance for rank decisions.
    #[arg(long, default_value_t = hermite_lab::DEFAULT_RANK_TOL)]
    tol: f64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long, default_value_t = hermite_lab::DEFAULT_RANK_TOL)]
    tol: f64,
    #[arg(long, default_value_t = hermite_lab::DEFAULT_TRUNCATION)]
    order: usize,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ScanMode {
    Shift,
    Scale,
    Affine,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    mode: ScanMode,
    #[command(flatten)]
    spec: SpecArg,
    /// First axis (shift, or scale for --mode scale).
    #[arg(long, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, allow_hyphen_values = true)]
    hi: f64,
    #[arg(long)]
    steps: usize,
    /// Second (scale) axis for --mode affine.
    #[arg(long, requires = "hi2")]
    lo2: Option<f64>,
    #[arg(long, requires = "steps2")]
    hi2: Option<f64>,
    #[arg(long)]
    steps2: Option<usize>,
    #[arg(long, default_value_t = hermite_lab::DEFAULT_RANK_TOL)]
    tol: f64,
    #[arg(long)]
    nodes: Option<usize>,
    /// Writes PREFIX.csv (grid) and PREFIX.json (summary).
    #[arg(long)]
    out_prefix: std::path::PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PathFormat {
    Csv,
    Bin,
}

#[derive(Args)]
struct FgnArgs {
    #[arg(long)]
    hurst: f64,
    #[arg(long)]
    length: usize,
    #[arg(long)]
    seed: u64,
    /// Paths to sample, with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    replicates: usize,
    #[arg(long, value_enum, default_value_t = PathFormat::Csv)]
    format: PathFormat,
    /// Writes PREFIX.SEED.csv, or .bin plus a .json sidecar.
    #[arg(long)]
    out_prefix: std::path::PathBuf,
}

#[derive(Args)]
struct RegimeArgs {
    /// Experiment description: inline JSON or @path.
    experiment: String,
    /// Writes PREFIX.results.csv, PREFIX.json and PREFIX.plot.
    #[arg(long)]
    out_prefix: std::path::PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory of regime result JSON files.
    directory: std::path::PathBuf,
    /// |estimated - predicted| threshold for the pass column.
    #[arg(long, default_value_t = 0.05)]
    tol: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Only effective once per process; a failure here means a pool is
        // already running, which is fine.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let result = match cli.command {
        Command::Expand(args) => commands::expand(args),
        Command::Rank(args) => commands::rank(args),
        Command::Scan(args) => commands::scan(args),
        Command::Fgn(args) => commands::fgn(args),
        Command::Regime(args) => commands::regime(args),
        Command::Report(args) => commands::report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
