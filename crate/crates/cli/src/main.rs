//! `qforma` command-line tool.

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Params, Settings};
use error::CliError;
use output::write_text;

#[derive(Debug, Parser)]
#[command(name = "qforma", version, about = "Moment bounds for quadratic forms and precision-matrix tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    params: Params,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a moment bound for one matrix or sparse class
    Bound,
    /// Tabulate the four-term and baseline bounds over a dimension grid
    CompareScaling,
    /// Estimate E|x^T A x - tr A|^q and check it against oracles and bounds
    Verify,
    /// Run a likelihood ratio test; exits 1 when the null is rejected
    Test,
    /// Write simulated observations x = Omega^{-1/2} y as a data CSV
    Simulate,
    /// Gaussian null percentile of sum_j d_j chi2_j(n) for the eigenvalues of a matrix
    Percentile,
    /// Print the default parameter values
    Defaults,
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let settings = Settings::load(cli.params)?;
    let format = settings.format()?;
    let out = settings.out()?;
    let report = match cli.command {
        Command::Bound => commands::bound(&settings)?,
        Command::CompareScaling => commands::compare_scaling(&settings)?,
        Command::Verify => commands::verify(&settings)?,
        Command::Test => commands::test(&settings)?,
        Command::Percentile => commands::percentile(&settings)?,
        Command::Defaults => commands::show_defaults()?,
        Command::Simulate => {
            write_text(&commands::simulate(&settings)?, out.as_deref())?;
            return Ok(0);
        }
    };
    report.write(format, out.as_deref())?;
    Ok(report.exit)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
