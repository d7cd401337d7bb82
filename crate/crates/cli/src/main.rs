use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use coalsim::commands::{cmd_commtime, cmd_compare, cmd_run, cmd_sweep, cmd_tables, SweepParameter};
use coalsim::report::{
    commtime_csv, compare_csv, run_report_csv, sweep_csv, tables_csv, to_json,
};
use coalsim_core::load_scenario;

/// Deterministic simulator of the joint auction / coalition-formation game
/// for UAV-assisted federated learning.
#[derive(Parser)]
#[command(name = "coalsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Override the scenario's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Param {
    CooperationCost,
    RequiredIterations,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a stable partition and allocate it to cells.
    Run {
        #[command(flatten)]
        common: Common,
        /// Append the exhaustive-search oracle digest.
        #[arg(long)]
        oracle: bool,
        /// Include the committed merge/split move log.
        #[arg(long)]
        trace: bool,
    },
    /// Emit the cell-valuation and revenue/cost/profit matrices.
    Tables {
        #[command(flatten)]
        common: Common,
    },
    /// Re-run the pipeline for each value of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        parameter: Param,
        /// Comma-separated values; an empty list produces no records.
        #[arg(long, value_delimiter = ',', num_args = 0.., allow_hyphen_values = true)]
        values: Vec<f64>,
    },
    /// Compare the joint scheme against two randomized baselines.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        rounds: u32,
    },
    /// Sample worker vs UAV uplink transmission times.
    Commtime {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(1..))]
        draws: u32,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_EMPTY: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("coalsim: {message}");
    ExitCode::from(EXIT_USAGE)
}

fn emit(common: &Common, text: &str) -> Result<(), std::io::Error> {
    match &common.out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Run { common, .. }
        | Command::Tables { common }
        | Command::Sweep { common, .. }
        | Command::Compare { common, .. }
        | Command::Commtime { common, .. } => common,
    };

    let text = match std::fs::read_to_string(&common.scenario) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {e}", common.scenario.display())),
    };
    let mut scenario = match load_scenario(&text) {
        Ok(sc) => sc,
        Err(e) => return fail(e),
    };
    if let Some(seed) = common.seed {
        scenario.game.rng_seed = seed;
    }

    let mut exit = EXIT_OK;
    let rendered = match &cli.command {
        Command::Run { oracle, trace, .. } => match cmd_run(&scenario, *oracle, *trace) {
            Ok(report) => {
                if report.allocations.is_empty() {
                    exit = EXIT_EMPTY;
                }
                match common.format {
                    Format::Csv => run_report_csv(&report),
                    Format::Json => to_json(&report),
                }
            }
            Err(e) => return fail(e),
        },
        Command::Tables { .. } => match cmd_tables(&scenario) {
            Ok(rows) => match common.format {
                Format::Csv => tables_csv(&rows),
                Format::Json => to_json(&rows),
            },
            Err(e) => return fail(e),
        },
        Command::Sweep {
            parameter, values, ..
        } => {
            let parameter = match parameter {
                Param::CooperationCost => SweepParameter::CooperationCost,
                Param::RequiredIterations => SweepParameter::RequiredIterations,
            };
            match cmd_sweep(&scenario, parameter, values) {
                Ok(records) => match common.format {
                    Format::Csv => sweep_csv(&records),
                    Format::Json => to_json(&records),
                },
                Err(e) => return fail(e),
            }
        }
        Command::Compare { rounds, .. } => match cmd_compare(&scenario, *rounds) {
            Ok(rows) => match common.format {
                Format::Csv => compare_csv(&rows),
                Format::Json => to_json(&rows),
            },
            Err(e) => return fail(e),
        },
        Command::Commtime { draws, .. } => match cmd_commtime(&scenario, *draws) {
            Ok(rows) => match common.format {
                Format::Csv => commtime_csv(&rows),
                Format::Json => to_json(&rows),
            },
            Err(e) => return fail(e),
        },
    };

    if let Err(e) = emit(common, &rendered) {
        return fail(format!("writing output: {e}"));
    }
    ExitCode::from(exit)
}
