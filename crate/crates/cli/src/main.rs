mod commands;
mod config;
mod output;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use inspectrank_core::error::Error;

/// Exit codes: 0 success, 1 usage, 2 data validation, 3 resource limits.
#[derive(Parser)]
#[command(
    name = "inspectrank",
    version,
    about = "Pre-event earthquake inspection prioritization and budget studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank buildings for field inspection at a fixed event
    Prioritize(commands::PrioritizeArgs),
    /// Monte Carlo budget sweep: cost frontier, samples, and CDFs
    Sweep(commands::SweepArgs),
    /// Re-derive Pareto flags from a sweep.csv
    Pareto(commands::ParetoArgs),
    /// Decision breakdowns for fixed intensity scenarios
    Simulate(commands::SimulateArgs),
    /// Generate a synthetic building inventory CSV
    GenInventory(commands::GenInventoryArgs),
    /// Emit the cost model configuration as TOML
    CostConfig(commands::CostConfigArgs),
    /// Tabulate fragility curves over an intensity grid
    Curves(commands::CurvesArgs),
}

fn main() {
    env_logger::init();
    if let Err(message) = configure_threads() {
        eprintln!("error: {message}");
        std::process::exit(1);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Prioritize(args) => commands::prioritize(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Pareto(args) => commands::pareto(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::GenInventory(args) => commands::gen_inventory(args),
        Command::CostConfig(args) => commands::cost_config(args),
        Command::Curves(args) => commands::curves(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(match err {
            Error::Size(_) => 3,
            _ => 2,
        });
    }
}

/// `INSPECTRANK_THREADS` caps the worker pool. Results do not depend on it;
/// it only bounds parallelism.
fn configure_threads() -> Result<(), String> {
    let raw = match std::env::var("INSPECTRANK_THREADS") {
        Ok(raw) => raw,
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(e) => return Err(format!("INSPECTRANK_THREADS: {e}")),
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("INSPECTRANK_THREADS must be a positive integer, got {raw:?}"))?;
    if threads == 0 {
        return Err("INSPECTRANK_THREADS must be at least 1".to_string());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| format!("could not configure {threads} worker threads: {e}"))
}
