//! `secrecy-toolkit`: channel checks, rate regions, constraint-system
//! derivations and code simulations from TOML inputs.

mod commands;
mod error;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use secrecy_core::theorems::{AuxSizes, DEFAULT_GRID};

use commands::{RegionArgs, RegionMode, SimulateArgs};
use error::CliError;

/// Caps the worker count of every parallel stage.
const THREADS_ENV: &str = "SECRECY_TOOLKIT_THREADS";

#[derive(Parser)]
#[command(name = "secrecy-toolkit", version, about = "Individual-secrecy rate regions for broadcast channels with receiver side information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report output determinism and the six degradedness orders.
    ChannelCheck { spec: PathBuf },
    /// Compute a rate region and write its vertex CSV and half-plane sidecar.
    Region {
        spec: PathBuf,
        #[arg(long, value_enum)]
        mode: RegionMode,
        /// Auxiliary cascade (thm1-single-cascade).
        #[arg(long)]
        cascade: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random cascades in thm1-search.
        #[arg(long, default_value_t = 5000)]
        budget: usize,
        /// Input distributions in the p(x) grid.
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Auxiliary alphabet sizes u,v,v1,v2 for thm1-search.
        #[arg(long, value_parser = parse_sizes, default_value = "2,2,2,2")]
        sizes: AuxSizes,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Replace the region by its convex hull before writing.
        #[arg(long)]
        convexify: bool,
    },
    /// Rebuild the layered constraint system of a cascade and project it.
    FmDerive {
        spec: PathBuf,
        cascade: PathBuf,
        /// Add the two implied secrecy rows and compare the projections.
        #[arg(long)]
        include_redundant: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Monte-Carlo run of the layered code.
    Simulate {
        spec: PathBuf,
        cascade: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        eps_prime: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Trials per codebook; 0 keeps one codebook.
        #[arg(long)]
        regen_every: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn parse_sizes(s: &str) -> Result<AuxSizes, String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a size")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [u, v, v1, v2] if u > 0 && v > 0 && v1 > 0 && v2 > 0 => Ok((u, v, v1, v2)),
        _ => Err("expected four positive sizes u,v,v1,v2".into()),
    }
}

fn thread_cap() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Input(format!("{THREADS_ENV} must be a positive integer, got `{s}`"))),
        },
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let threads = thread_cap()?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Infeasible(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::ChannelCheck { spec } => commands::channel_check(&spec),
        Command::Region { spec, mode, cascade, seed, budget, grid, sizes, out, convexify } => {
            commands::region(&spec, &RegionArgs { mode, cascade, seed, budget, grid, sizes, out, convexify })
        }
        Command::FmDerive { spec, cascade, include_redundant, out } => {
            commands::fm_derive(&spec, &cascade, include_redundant, &out)
        }
        Command::Simulate { spec, cascade, config, n, trials, eps, eps_prime, seed, regen_every, out } => {
            let args = SimulateArgs { config, n, trials, eps, eps_prime, seed, regen_every, out, threads };
            commands::simulate(&spec, &cascade, &args)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
