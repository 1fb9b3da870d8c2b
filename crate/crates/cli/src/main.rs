mod attribute;
mod common;
mod data;
mod evaluate;
mod experiment;
mod train;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use common::CliError;

#[derive(Debug, Parser)]
#[command(name = "idg", version, about = "Path-integral attribution toolkit")]
struct Cli {
    /// Seed for every random choice made by the command.
    #[arg(long, global = true, env = "DG_SEED", default_value_t = 7)]
    seed: u64,
    /// Worker threads for per-image work; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic shapes dataset as PGM files plus labels.csv.
    MakeData(data::MakeData),
    /// Train the toy CNN on a dataset directory.
    Train(train::Train),
    /// Attribute one input and write the map, a heatmap and sampling details.
    Attribute(attribute::Attribute),
    /// Score attribution methods with perturbation metrics over a dataset.
    Evaluate(evaluate::Evaluate),
    /// Run an analysis experiment.
    #[command(subcommand)]
    Experiment(experiment::Experiment),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let seed = cli.seed;
    pool.install(|| match cli.command {
        Command::MakeData(cmd) => cmd.run(seed),
        Command::Train(cmd) => cmd.run(seed),
        Command::Attribute(cmd) => cmd.run(seed),
        Command::Evaluate(cmd) => cmd.run(seed),
        Command::Experiment(cmd) => cmd.run(seed),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
