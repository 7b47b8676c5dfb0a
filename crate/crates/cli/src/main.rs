use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Sparse regression for p >> n: LAT and RAT fitting, simulation benchmarks
/// and data generation.
#[derive(Debug, Parser)]
#[command(name = "hdls", version, about)]
struct Cli {
    /// Worker threads. Defaults to all cores for `bench` and 1 otherwise.
    #[arg(long, global = true, env = "HDLS_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit LAT or RAT to a CSV file.
    Fit(FitArgs),
    /// Monte-Carlo comparison on a synthetic example, or k-fold prediction on a CSV file.
    Bench(BenchArgs),
    /// Write a synthetic example as CSV.
    Generate(GenerateArgs),
    /// Compare primal and dual ridge solutions on random data.
    CheckIdentity(CheckIdentityArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// CSV file with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Response column, by name or zero-based index.
    #[arg(long, default_value = "y")]
    response: String,
    /// The file has no header row; columns are named c0, c1, ...
    #[arg(long)]
    no_header: bool,
    /// Comma-separated categorical columns. Detected from the data when omitted.
    #[arg(long, value_delimiter = ',')]
    categorical: Option<Vec<String>>,
    /// Add products of every pair of distinct features.
    #[arg(long)]
    interactions: bool,
    /// Keep columns that are constant.
    #[arg(long)]
    keep_constant: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Lat,
    Rat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage1Arg {
    Topd,
    Ebic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage2Arg {
    Threshold,
    Corollary,
    Bic,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Lat)]
    method: MethodArg,
    /// Screening size. Defaults to floor(0.3 n).
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = hdls::selection::DEFAULT_DELTA)]
    delta: f64,
    /// Fixed ridge parameter for RAT.
    #[arg(long, conflicts_with = "cv")]
    ridge: Option<f64>,
    /// Choose the RAT ridge parameter by cross-validation (the default for RAT).
    #[arg(long)]
    cv: bool,
    #[arg(long, default_value_t = hdls::pipeline::DEFAULT_FOLDS)]
    folds: usize,
    #[arg(long, value_enum, default_value_t = Stage1Arg::Topd)]
    stage1: Stage1Arg,
    #[arg(long, value_enum, default_value_t = Stage2Arg::Threshold)]
    stage2: Stage2Arg,
    /// eBIC penalty weight for `--stage1 ebic`.
    #[arg(long, default_value_t = hdls::selection::DEFAULT_EBIC_GAMMA)]
    ebic_gamma: f64,
    /// Sub-Gaussian constant for `--stage2 corollary`.
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Seed for cross-validation folds.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the fit record here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Synthetic example: i, ii, iii or iv.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    example: Option<String>,
    /// CSV file for k-fold prediction instead of a synthetic example.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "y")]
    response: String,
    #[arg(long)]
    interactions: bool,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    p: usize,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = hdls::datagen::DEFAULT_SNR)]
    snr: f64,
    /// Comma-separated methods: lat, rat (cross-validated) or rat=<r>.
    #[arg(long, default_value = "lat,rat")]
    methods: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = hdls::pipeline::DEFAULT_FOLDS)]
    folds: usize,
    /// Write line-delimited records here, and the table to `<out>.txt`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    example: String,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    p: usize,
    #[arg(long, default_value_t = hdls::datagen::DEFAULT_SNR)]
    snr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the true coefficients as JSON.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckIdentityArgs {
    #[arg(long, requires = "p")]
    n: Option<usize>,
    #[arg(long, requires = "n")]
    p: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();

    let default_threads = match cli.command {
        Command::Bench(_) => 0,
        _ => 1,
    };
    let threads = cli.threads.unwrap_or(default_threads);
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
    {
        log::warn!("could not configure thread pool: {e}");
    }

    let outcome = match cli.command {
        Command::Fit(args) => commands::fit(args),
        Command::Bench(args) => commands::bench(args),
        Command::Generate(args) => commands::generate(args),
        Command::CheckIdentity(args) => commands::check_identity(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
