use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod io;

use commands::{Context, Failure};
use config::RunConfig;

/// Minimum-input controls for the 1-D wave equation.
#[derive(Parser)]
#[command(name = "tbvp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress the summary on standard output.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the minimizer for the configured norm and write CSV data.
    Solve(Common),
    /// Check a candidate input given as a two-column CSV (x, v).
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// Cross-check the minimizer with an iterative solver.
    Oracle(Common),
    /// Build C¹ approximations along the configured eps schedule.
    Pms(Common),
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("TBVP_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure {
            code: commands::EXIT_CONFIG,
            message: format!("TBVP_THREADS must be a positive integer, got `{raw}`"),
        })?;
    // a second initialization only happens in tests; keep the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn context(common: &Common) -> Result<Context, Failure> {
    let config = RunConfig::load(&common.config)?;
    let out = common
        .out
        .clone()
        .unwrap_or_else(|| config.output_dir.clone());
    Ok(Context {
        config,
        out,
        quiet: common.quiet,
    })
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    configure_threads()?;
    match &cli.command {
        Command::Solve(common) => commands::solve(&context(common)?),
        Command::Verify { common, input } => commands::verify(&context(common)?, input),
        Command::Oracle(common) => commands::oracle(&context(common)?),
        Command::Pms(common) => commands::pms(&context(common)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code)
        }
    }
}
