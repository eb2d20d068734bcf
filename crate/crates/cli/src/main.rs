//! fepnet: grow networks under free-energy attachment kernels, run the 1-D
//! agent simulation, and analyze degree distributions.
//!
//! Exit codes: 0 success, 1 configuration/validation error, 2 runtime error.

use clap::{Args, Parser, Subcommand};
use fepnet_cli::config::{parse_config, Mode};
use fepnet_cli::run::{resolve_out_dir, run_experiment};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fepnet",
    version,
    about = "Free-energy agent network experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's out_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (overrides the config's seed).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Grow a network under the configured attachment kernel.
    Grow(CommonArgs),
    /// Grow the linear-kernel Barabási–Albert baseline.
    #[command(name = "grow-ba")]
    GrowBa(CommonArgs),
    /// Run the 1-D spatial agent simulation.
    Simulate(CommonArgs),
    /// Analyze an edge-list file: histogram, CCDF, tail fits, knee.
    Analyze(CommonArgs),
    /// Sweep a config parameter over a list of values and summarize.
    Sweep(CommonArgs),
    /// Tabulate both attachment kernels with regimes and local exponents.
    #[command(name = "kernel-table")]
    KernelTable(CommonArgs),
}

impl Command {
    fn mode(&self) -> Mode {
        match self {
            Command::Grow(_) => Mode::Grow,
            Command::GrowBa(_) => Mode::GrowBa,
            Command::Simulate(_) => Mode::Simulate,
            Command::Analyze(_) => Mode::Analyze,
            Command::Sweep(_) => Mode::Sweep,
            Command::KernelTable(_) => Mode::KernelTable,
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Grow(args)
            | Command::GrowBa(args)
            | Command::Simulate(args)
            | Command::Analyze(args)
            | Command::Sweep(args)
            | Command::KernelTable(args) => args,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = cli.command.mode();
    let args = cli.command.args();

    let mut config = match parse_config(&args.config, Some(mode)) {
        Ok(config) => config,
        Err(error) => {
            eprintln!("error: {error}");
            return ExitCode::from(1);
        }
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let raw_text = match std::fs::read_to_string(&args.config) {
        Ok(text) => text,
        Err(error) => {
            eprintln!("error: cannot reread config: {error}");
            return ExitCode::from(2);
        }
    };

    let out_dir = resolve_out_dir(&config, args.out.as_deref());
    match run_experiment(&config, &raw_text, &out_dir) {
        Ok(record) => {
            println!(
                "{} finished: {} output file(s) under {} ({:.2}s)",
                mode,
                record.outputs.len(),
                out_dir.display(),
                record.wall_time_s
            );
            ExitCode::SUCCESS
        }
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(2)
        }
    }
}
