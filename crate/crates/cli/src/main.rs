//! Command-line front end for the relay-link analysis and simulation library.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

/// Exit statuses.
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_ACCURACY: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "ostbc-relay", version, about = "Antenna selection over amplify-and-forward OSTBC relay links")]
struct Cli {
    /// Plain `key = value` file supplying flags; explicit flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Symbol and bit error rates against average SNR.
    Ser(SerArgs),
    /// Run the cross-validation suite.
    Validate(ValidateArgs),
    /// Minimum receive antennas matching the unselected mean SNR.
    CapacityTable(TableArgs),
    /// Ergodic capacity with and without antenna selection.
    ErgodicCapacity(CapacityArgs),
    /// Density and CDF of the end-to-end channel gain.
    Pdf(PdfArgs),
    /// Moment generating function of the end-to-end channel gain.
    Mgf(MgfArgs),
}

#[derive(Args, Debug, Clone)]
struct SelectionArgs {
    /// Source antennas.
    #[arg(long = "K", default_value_t = 2)]
    k: usize,
    /// Destination antennas.
    #[arg(long = "N", default_value_t = 2)]
    n: usize,
    /// Selected source antennas (defaults to K).
    #[arg(long = "Ks")]
    k_s: Option<usize>,
    /// Selected destination antennas (defaults to N).
    #[arg(long = "Ns")]
    n_s: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (0 = all cores); results do not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output CSV path; a `.manifest` file is written next to it.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModArg {
    Psk,
    Qam,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Exact,
    Sim,
    Both,
}

#[derive(Args, Debug, Clone)]
struct SerArgs {
    #[arg(long = "mod", value_enum, default_value = "psk")]
    modulation: ModArg,
    /// Constellation size.
    #[arg(long = "M", default_value_t = 8)]
    m: u32,
    #[command(flatten)]
    selection: SelectionArgs,
    /// Code rate; 1 simulates the Alamouti matrix link, other rates use the
    /// equivalent scalar channel.
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    /// Simulate through the equivalent scalar channel even at rate 1.
    #[arg(long)]
    fast: bool,
    /// Average SNR per receive antenna in dB, `start:stop:step`.
    #[arg(long, default_value = "0:20:5", allow_hyphen_values = true)]
    snr_db_range: String,
    #[arg(long, value_enum, default_value = "both")]
    method: Method,
    #[arg(long, default_value_t = 100_000)]
    min_symbols: u64,
    #[arg(long, default_value_t = 200)]
    min_errors: u64,
    #[arg(long, default_value_t = 100_000_000)]
    max_symbols: u64,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug, Clone)]
struct ValidateArgs {
    /// Use 10^5 trials per statistical check.
    #[arg(long)]
    quick: bool,
    /// Comma-separated check names to run (default: all).
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    #[arg(long, default_value_t = 20_070_601)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Multiplies every tolerance; for exercising the failure path.
    #[arg(long, default_value_t = 1.0, hide = true)]
    tolerance_scale: f64,
    /// Also write the report to this file.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct TableArgs {
    #[arg(long = "K-range", default_value = "2:7")]
    k_range: String,
    #[arg(long = "N-range", default_value = "2:10")]
    n_range: String,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Discrepancy report path (default: stderr, or `<out>.discrepancies.txt`).
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct CapacityArgs {
    #[command(flatten)]
    selection: SelectionArgs,
    /// SNR ρ in dB, `start:stop:step`.
    #[arg(long, default_value = "0:30:5", allow_hyphen_values = true)]
    rho_db_range: String,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum GridKind {
    Log,
    Linear,
}

#[derive(Args, Debug, Clone)]
struct PdfArgs {
    #[command(flatten)]
    selection: SelectionArgs,
    #[arg(long, value_enum, default_value = "log")]
    grid: GridKind,
    /// Smallest θ (default 1e-12 on a log grid, one step above 0 on a linear one).
    #[arg(long)]
    theta_min: Option<f64>,
    /// Largest θ (default: far enough into the tail to hold all the mass).
    #[arg(long)]
    theta_max: Option<f64>,
    #[arg(long, default_value_t = 40_001)]
    points: usize,
    /// Simulated draws of Θ for empirical columns (0 = none).
    #[arg(long, default_value_t = 0)]
    samples: u64,
    /// Write the closed-form term lists to this file.
    #[arg(long, value_name = "PATH")]
    dump_terms: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug, Clone)]
struct MgfArgs {
    #[command(flatten)]
    selection: SelectionArgs,
    /// Comma-separated s values.
    #[arg(long, default_value = "0,0.1,0.5,1,2,5", conflicts_with = "s_range")]
    s_values: String,
    /// Alternative `start:stop:step` s grid.
    #[arg(long)]
    s_range: Option<String>,
    /// Simulated draws for the empirical MGF (0 = none).
    #[arg(long, default_value_t = 0)]
    trials: u64,
    /// Write the closed-form term list to this file.
    #[arg(long, value_name = "PATH")]
    dump_terms: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

const SUBCOMMANDS: [&str; 6] = ["ser", "validate", "capacity-table", "ergodic-capacity", "pdf", "mgf"];

fn parse_cli() -> Result<Cli, clap::Error> {
    let mut cmd = Cli::command().args_override_self(true);
    for name in SUBCOMMANDS {
        cmd = cmd.mut_subcommand(name, |s| s.args_override_self(true));
    }
    let argv: Vec<String> = std::env::args().collect();
    let argv = config::expand_config(argv, &SUBCOMMANDS).map_err(|e| cmd.error(clap::error::ErrorKind::Io, e))?;
    let matches = cmd.try_get_matches_from(argv)?;
    Cli::from_arg_matches(&matches)
}

fn main() -> ExitCode {
    let cli = match parse_cli() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
