//! `gausseng`: analyze, engineer and simulate Markovian Gaussian systems.
//!
//! Exit codes: 0 success, 1 error, 2 steady state not pure, 3 steady state
//! not unique (or drift not Hurwitz for `simulate`), 4 rank condition failed.

mod commands;
mod io;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "gausseng",
    version,
    about = "Pure steady states of Markovian Gaussian dissipative systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a system for a unique pure steady state.
    Analyze(AnalyzeArgs),
    /// Synthesize a system whose unique steady state is a target pure state.
    Engineer(EngineerArgs),
    /// Integrate the moment equations and write a CSV trajectory.
    Simulate(SimulateArgs),
    /// Inspect and export the built-in systems and states.
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

/// Where the input comes from: a JSON file or a catalog entry.
#[derive(Args)]
pub struct Source {
    /// Input JSON file.
    #[arg(required_unless_present = "catalog", conflicts_with = "catalog")]
    pub file: Option<PathBuf>,
    /// Use a catalog entry instead of a file.
    #[arg(long, value_name = "NAME")]
    pub catalog: Option<String>,
    /// Override a catalog parameter, e.g. `--set eps=4.8`.
    #[arg(long = "set", value_name = "NAME=VALUE", value_parser = commands::parse_override, requires = "catalog")]
    pub overrides: Vec<(String, f64)>,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub source: Source,
    /// Modes on one side of the cut for the log-negativity, 1-based and
    /// comma-separated. Defaults to mode 1 when there are two or more modes.
    #[arg(long, value_delimiter = ',', value_name = "MODES")]
    pub partition: Vec<usize>,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args)]
pub struct EngineerArgs {
    #[command(flatten)]
    pub source: Source,
    /// Parameter file with keys "P", "R" and "Gamma".
    #[arg(
        long,
        value_name = "FILE",
        required_unless_present = "purely_dissipative"
    )]
    pub params: Option<PathBuf>,
    /// Use P = I and R = Gamma = 0.
    #[arg(long, conflicts_with = "params")]
    pub purely_dissipative: bool,
    /// Where to write the synthesized system. Nothing is written if the rank
    /// condition fails.
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: Source,
    /// Initial covariance: `vacuum` (I/2), `steady`, or a number c for c·I.
    #[arg(long, default_value = "vacuum", value_name = "INIT")]
    pub init: String,
    /// Final time. Defaults to 40 over the slowest decay rate.
    #[arg(long, value_name = "T")]
    pub t_final: Option<f64>,
    /// Step size. Defaults to a fraction of the fastest time scale.
    #[arg(long, value_name = "DT")]
    pub dt: Option<f64>,
    /// CSV output file; standard output if omitted.
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Integrate even if the drift is not Hurwitz.
    #[arg(long)]
    pub force: bool,
}

#[derive(Subcommand)]
pub enum CatalogCommand {
    /// List entries and their parameters.
    List,
    /// Print the matrices of an entry.
    Show(EntryArgs),
    /// Write an entry as a system or spec file.
    Export(ExportArgs),
}

#[derive(Args)]
pub struct EntryArgs {
    pub name: String,
    #[arg(long = "set", value_name = "NAME=VALUE", value_parser = commands::parse_override)]
    pub overrides: Vec<(String, f64)>,
}

#[derive(Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub entry: EntryArgs,
    /// Output file; standard output if omitted.
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    // clap's own usage-error code (2) would collide with "not pure"
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() {
                commands::EXIT_ERROR
            } else {
                0
            });
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => commands::analyze(&args),
        Command::Engineer(args) => commands::engineer(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Catalog(cmd) => commands::catalog(&cmd),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::EXIT_ERROR)
        }
    }
}
