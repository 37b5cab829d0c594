use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eulerring_cli::pipeline::{self, Candidate, Settings};
use eulerring_cli::spec::RouteChoice;
use eulerring_cli::{CliError, EquationSpec, EXIT_CHECK_FAILED};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "eulerring", version, about = "Particular solutions of Cauchy-Euler type equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the equation and write a solution report.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        route: Option<RouteChoice>,
        #[arg(long)]
        trunc: Option<u32>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// Also run the series and quadrature routes against each other.
        #[arg(long)]
        cross: bool,
    },
    /// Print φ in the standard and Pochhammer bases.
    Phi {
        #[command(flatten)]
        common: Common,
    },
    /// Print the roots of a univariate φ and the partial fractions of 1/φ.
    Partfrac {
        #[command(flatten)]
        common: Common,
    },
    /// Check a user-supplied candidate solution against the equation.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Candidate as an expression over the spec's variables.
        #[arg(long, conflicts_with = "candidate_series", required_unless_present = "candidate_series")]
        candidate: Option<String>,
        /// Candidate as a JSON series file.
        #[arg(long)]
        candidate_series: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// Equation specification (JSON).
    spec: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Input(e.to_string()))? + "\n";
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let load = |c: &Common| EquationSpec::from_path(&c.spec)?.validate();
    match cli.command {
        Command::Solve {
            common,
            route,
            trunc,
            nodes,
            tol,
            cross,
        } => {
            let settings = Settings {
                route,
                trunc,
                nodes,
                tol,
                cross,
            };
            let report = pipeline::solve(&load(&common)?, &settings)?;
            emit(&report, common.out.as_deref())?;
            Ok(report.passed)
        }
        Command::Phi { common } => {
            emit(&pipeline::phi_report(&load(&common)?), common.out.as_deref())?;
            Ok(true)
        }
        Command::Partfrac { common } => {
            emit(&pipeline::partfrac_report(&load(&common)?)?, common.out.as_deref())?;
            Ok(true)
        }
        Command::Verify {
            common,
            candidate,
            candidate_series,
            tol,
        } => {
            let problem = load(&common)?;
            let cand = match (candidate, candidate_series) {
                (Some(e), _) => Candidate::Expression(e),
                (None, Some(path)) => Candidate::SeriesJson(
                    std::fs::read_to_string(&path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
                ),
                (None, None) => return Err(CliError::Input("a candidate is required".into())),
            };
            let settings = Settings {
                tol,
                ..Settings::default()
            };
            let report = pipeline::verify(&problem, &cand, &settings)?;
            emit(&report, common.out.as_deref())?;
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("EULERRING_THREADS") {
        match v.parse::<usize>() {
            Ok(n) => {
                eulerring::exec::configure_threads(n);
            }
            Err(_) => eprintln!("warning: ignoring EULERRING_THREADS={v}"),
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
