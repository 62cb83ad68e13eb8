mod bench;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cetsp", version, about = "Close-Enough TSP heuristic solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file, keeping the shortest of several seeded runs.
    Solve(SolveArgs),
    /// Write a random or structured instance.
    Generate(GenerateArgs),
    /// Check a solution against its instance.
    Validate(ValidateArgs),
    /// Draw an instance and its tour as SVG.
    Render(RenderArgs),
    /// Recover a common radius from centres and a tour through them.
    Reconstruct(ReconstructArgs),
    /// Time the solver over a range of instance sizes and write CSV.
    Bench(BenchArgs),
    /// Simulate the reinsertion gadget and check the 2n bound.
    Gadget(GadgetArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    Random,
    Structured,
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Replace every radius in the instance file.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Seed of the first run; run i uses seed + i.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub k_cluster: u64,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub k_segments: u64,
    /// Refine each new point with one Newton step.
    #[arg(long)]
    pub newton: bool,
    /// Cap reinserted circles at this multiple of the instance size.
    #[arg(long, default_value_t = 2.0, conflicts_with = "no_budget")]
    pub budget_factor: f64,
    /// Never cap reinsertions.
    #[arg(long)]
    pub no_budget: bool,
    /// Write the merge and construction events of the best run as JSON.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Solution file; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub n: usize,
    /// Half-width of the square holding random centres.
    #[arg(long, default_value_t = 100.0)]
    pub limit: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub solution: PathBuf,
    /// Membership tolerance; defaults to 1e-6 times the instance diagonal.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub solution: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ReconstructArgs {
    /// Rows whose first two columns are circle centres.
    #[arg(long)]
    pub centers: PathBuf,
    /// Tour points, either as rows or as a solution file.
    #[arg(long)]
    pub tour: PathBuf,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Comma-separated instance sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    /// Base seed; repetition i generates and solves with seed + i.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 100.0)]
    pub limit: f64,
    /// Time every solve this many times and report the fastest run of each
    /// phase. Results are identical across runs; only the clock differs.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub timing_runs: u64,
    /// Skip the untimed warm-up solve.
    #[arg(long)]
    pub no_warmup: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct GadgetArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 50)]
    pub seeds: u64,
}

/// How a command that ran to completion ended.
pub enum Outcome {
    Success,
    Violation,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Generate(a) => commands::generate(a),
        Command::Validate(a) => commands::validate(a),
        Command::Render(a) => commands::render(a),
        Command::Reconstruct(a) => commands::reconstruct(a),
        Command::Bench(a) => bench::run(a),
        Command::Gadget(a) => commands::gadget(a),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
