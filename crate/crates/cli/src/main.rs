//! `photon-filter`: run experiment files through the parity filter simulator.
//!
//! Exit codes: 0 on success, 1 when the input file cannot be read or parsed,
//! 2 when the simulation itself fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use photon_filter::experiment::{
    compare, compare_csv, parse_experiment, run_experiment, sweep, ExperimentSpec, JsonReport,
    OracleReport, SweepParam,
};
use photon_filter::FidelityConvention;

#[derive(Parser)]
#[command(
    name = "photon-filter",
    version,
    about = "Linear-optics parity filter simulator"
)]
struct Cli {
    /// Overlap convention used for reported fidelities.
    #[arg(long, global = true, value_name = "squared|amplitude")]
    fidelity: Option<FidelityConvention>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment file and print a JSON report.
    Simulate { file: PathBuf },
    /// Re-run an experiment over a parameter grid and print CSV.
    Sweep {
        file: PathBuf,
        #[arg(long)]
        param: SweepParam,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Print success probabilities of competing schemes as CSV.
    Compare {
        #[arg(long)]
        n_max: usize,
    },
    /// Run an experiment next to the analytic projector and print both.
    Oracle { file: PathBuf },
}

enum Failure {
    Parse(String),
    Simulation(String),
}

fn load(path: &Path, fidelity: Option<FidelityConvention>) -> Result<ExperimentSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    let parsed =
        parse_experiment(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    let mut spec = parsed.spec;
    if let Some(c) = fidelity {
        spec.convention = c;
    }
    Ok(spec)
}

fn sim<T>(r: photon_filter::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Simulation(e.to_string()))
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Simulate { file } => {
            let spec = load(&file, cli.fidelity)?;
            let report = sim(run_experiment(&spec))?;
            Ok(JsonReport::from_report(&report).to_json() + "\n")
        }
        Command::Sweep {
            file,
            param,
            from,
            to,
            steps,
        } => {
            let spec = load(&file, cli.fidelity)?;
            Ok(sim(sweep(&spec, param, from, to, steps))?.to_csv())
        }
        Command::Compare { n_max } => Ok(compare_csv(&sim(compare(n_max))?)),
        Command::Oracle { file } => {
            let spec = load(&file, cli.fidelity)?;
            let report = sim(run_experiment(&spec))?;
            Ok(sim(OracleReport::build(&spec, &report))?.to_json() + "\n")
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors count as bad input, not as simulation failures
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Simulation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
