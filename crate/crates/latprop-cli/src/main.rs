//! `latprop` command-line front end.

mod commands;
mod config;
mod output;
mod parse;
mod verify;

use clap::{Parser, Subcommand};
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

/// Error carrying the process exit code:
/// 1 verification failure, 2 bad arguments, 3 unsupported combination,
/// 4 accuracy or validity failure.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self { code: 2, msg: msg.into() }
    }

    pub fn verification(msg: impl Into<String>) -> Self {
        Self { code: 1, msg: msg.into() }
    }

    pub fn accuracy(msg: impl Into<String>) -> Self {
        Self { code: 4, msg: msg.into() }
    }
}

impl From<latprop::Error> for Failure {
    fn from(e: latprop::Error) -> Self {
        let code = match e {
            latprop::Error::Domain(_) => 2,
            latprop::Error::Unsupported(_) => 3,
            latprop::Error::Resource(_) | latprop::Error::Accuracy(_) | latprop::Error::Cone(_) => 4,
        };
        Self { code, msg: e.to_string() }
    }
}

#[derive(Parser)]
#[command(name = "latprop", version, about = "Lattice propagators, few-body amplitudes and their checks")]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the effective configuration as JSON and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One kernel value K(target, source; t).
    Kernel(RunConfig),
    /// Kernel over a window as CSV, with a summary sidecar.
    Grid(RunConfig),
    /// Few-body transition amplitude.
    Amplitude(RunConfig),
    /// Pair-migration probabilities across coordination numbers.
    Migrate(RunConfig),
    /// Verification suites as JSON lines.
    Verify(RunConfig),
    /// Operator-algebra residual report.
    Algebra(RunConfig),
    /// Wave-packet transport measurement.
    Transport(RunConfig),
}

fn run(cli: Cli) -> Result<(), Failure> {
    let base = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let (flags, f): (&RunConfig, fn(&RunConfig) -> Result<(), Failure>) = match &cli.command {
        Command::Kernel(c) => (c, commands::kernel),
        Command::Grid(c) => (c, commands::grid),
        Command::Amplitude(c) => (c, commands::amplitude),
        Command::Migrate(c) => (c, commands::migrate),
        Command::Verify(c) => (c, verify::run),
        Command::Algebra(c) => (c, commands::algebra),
        Command::Transport(c) => (c, commands::transport),
    };
    let cfg = base.overlay(flags);
    if cli.dump_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return Ok(());
    }
    f(&cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("latprop: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
