use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod provenance;

/// Exit codes: 0 success, 1 input error, 2 computation failure, 3 feasibility failure.
pub mod exit {
    pub const OK: u8 = 0;
    pub const INPUT: u8 = 1;
    pub const COMPUTE: u8 = 2;
    pub const INFEASIBLE: u8 = 3;
}

#[derive(Parser, Debug, serde::Serialize)]
#[command(name = "twomode", version, about = "Compile, simulate and check two-mode trapped-ion state preparation")]
struct Cli {
    /// Default directory for output files.
    #[arg(long, global = true, env = "TWOMODE_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, serde::Serialize)]
enum Command {
    /// Compile a target into de-evolution and preparation pulse sequences.
    Synthesize(SynthesizeArgs),
    /// Monte Carlo preparation fidelity under pulse-area noise.
    Simulate(SimulateArgs),
    /// Check the trap and coupling parameters against the validity conditions.
    Check(CheckArgs),
    /// Write a benchmark target coefficient file.
    Targets(TargetsArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Cat,
    Correlated,
    Custom,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
enum Regime {
    LambDicke,
    Nonlinear,
}

#[derive(Args, Debug, Clone, serde::Serialize)]
struct TargetArgs {
    #[arg(long = "target", value_enum)]
    kind: Kind,
    /// Real part of the coherent amplitude.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    alpha: f64,
    /// Imaginary part of the coherent amplitude.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha_im: f64,
    #[arg(long, default_value_t = 6)]
    mmax: usize,
    /// Defaults to --mmax.
    #[arg(long)]
    nmax: Option<usize>,
    /// Coefficient file for --target custom.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
struct SynthesizeArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[arg(long, value_enum, default_value = "lamb-dicke")]
    regime: Regime,
    #[arg(long, default_value_t = 0.1)]
    eps_x: f64,
    #[arg(long, default_value_t = 0.1)]
    eps_y: f64,
    /// Output directory (defaults to --out-dir).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
enum Interval {
    Centered,
    Wide,
    OneSided,
}

#[derive(Args, Debug, serde::Serialize)]
struct SimulateArgs {
    /// Preparation sequence file.
    #[arg(long)]
    sequence: PathBuf,
    /// Target coefficient file.
    #[arg(long)]
    target: PathBuf,
    /// Single noise range.
    #[arg(long, conflicts_with = "deltas")]
    delta: Option<f64>,
    /// Comma-separated noise ranges.
    #[arg(long, value_delimiter = ',')]
    deltas: Vec<f64>,
    #[arg(long, default_value_t = twomode::noise::DEFAULT_RUNS)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, value_enum, default_value = "centered")]
    interval: Interval,
    /// Output file (defaults to sweep.csv or sweep.json in --out-dir).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
struct CheckArgs {
    /// Effective Raman coupling |g|.
    #[arg(long)]
    g: f64,
    #[arg(long)]
    eps_x: f64,
    #[arg(long)]
    eps_y: f64,
    #[arg(long)]
    nu_x: f64,
    #[arg(long)]
    nu_y: f64,
    #[arg(long)]
    mmax: usize,
    #[arg(long)]
    nmax: usize,
    #[arg(long, default_value_t = twomode::channels::DEFAULT_FEASIBILITY_MARGIN)]
    margin: f64,
}

#[derive(Args, Debug, serde::Serialize)]
struct TargetsArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha_im: f64,
    #[arg(long, default_value_t = 6)]
    mmax: usize,
    #[arg(long)]
    nmax: Option<usize>,
    /// Output file (defaults to target.json in --out-dir).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = serde_json::to_value(&cli).unwrap_or(serde_json::Value::Null);
    let code = match &cli.command {
        Command::Synthesize(args) => commands::synthesize(&cli.out_dir, args, config),
        Command::Simulate(args) => commands::simulate(&cli.out_dir, args, config),
        Command::Check(args) => commands::check(args, config),
        Command::Targets(args) => commands::targets(&cli.out_dir, args, config),
    };
    ExitCode::from(code)
}
