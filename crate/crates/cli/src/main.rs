//! `harper`: Lyapunov exponents, densities of states, region tables and
//! verification batteries for the extended Harper model.
//!
//! Exit codes: 0 success, 1 computation or check failure, 2 usage or
//! configuration error. `HARPER_THREADS` sets the worker count (default:
//! physical cores).

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "harper", version, about = "Numerics for the extended Harper model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lyapunov exponent at a set of energies.
    Le(LeArgs),
    /// Density of states histogram from phase-pooled finite sections.
    Dos(DosArgs),
    /// Run a verification battery.
    Verify(VerifyArgs),
    /// Region tag, dual coupling, Jensen integral and closed-form LE.
    Regions(RegionsArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    #[arg(long, allow_hyphen_values = true)]
    l1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    l2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    l3: Option<f64>,
    /// `golden` or a number in (0, 1).
    #[arg(long, default_value = "golden", value_parser = config::parse_alpha)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Ergodic family: `harper` or `free`.
    #[arg(long, default_value = "harper")]
    model: String,
}

#[derive(Args, Debug)]
struct LeArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// `spectrum:K`, `grid:A:B:COUNT` or `list:E1,E2,...`.
    #[arg(long, allow_hyphen_values = true)]
    energies: String,
    #[arg(long, default_value = "100000", value_parser = parse_count)]
    steps: usize,
    /// Section size for spectrum sampling.
    #[arg(long, default_value = "500", value_parser = parse_count)]
    n: usize,
    /// Number of phases for spectrum sampling.
    #[arg(long, default_value = "20", value_parser = parse_count)]
    m: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DosArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value = "500", value_parser = parse_count)]
    n: usize,
    #[arg(long, default_value = "20", value_parser = parse_count)]
    m: usize,
    #[arg(long, default_value = "100", value_parser = parse_count)]
    bins: usize,
    /// Also write the sorted eigenvalue pool to this file.
    #[arg(long)]
    raw: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `format` from the configuration.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Overrides `output` from the configuration.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RegionsArgs {
    #[arg(long, allow_hyphen_values = true)]
    l1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    l2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    l3: Option<f64>,
    /// `S0:S1:NS,L0:L1:NL`: a grid over `(lambda1 + lambda3, lambda2)` with
    /// `lambda1 = lambda3`.
    #[arg(long, conflicts_with_all = ["l1", "l2", "l3"])]
    grid: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_count(s: &str) -> Result<usize, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a positive integer"))?;
    if x >= 1.0 && x.fract() == 0.0 && x < 1e15 {
        Ok(x as usize)
    } else {
        Err(format!("`{s}` is not a positive integer"))
    }
}

/// Failure classes, mapped to exit codes 2 and 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Compute(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(_) => 1,
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let threads = match std::env::var("HARPER_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Usage(format!("HARPER_THREADS must be a positive integer, got `{v}`")))?,
        Err(_) => num_cpus::get_physical().max(1),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Compute(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Le(a) => commands::le(&a),
        Command::Dos(a) => commands::dos(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Regions(a) => commands::regions(&a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let code = f.code();
            match f {
                Failure::Usage(msg) => eprintln!("error: {msg}\n\nFor more information, try '--help'."),
                Failure::Compute(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(code)
        }
    }
}
