use std::io::Write;
use std::process::ExitCode;

use bppr::commands::{self, AleArgs, DiagnoseArgs, FitArgs, PredictArgs, ScoreArgs, SimulateArgs};
use clap::{Parser, Subcommand};

/// Bayesian projection pursuit regression.
#[derive(Parser)]
#[command(name = "bppr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run the sampler and write a model file.
    Fit(FitArgs),
    /// Posterior means and intervals at new inputs.
    Predict(PredictArgs),
    /// ESS and split R-hat of a model's sigma trace.
    Diagnose(DiagnoseArgs),
    /// One-way accumulated local effects of a feature.
    Ale(AleArgs),
    /// Write a simulated benchmark dataset.
    Simulate(SimulateArgs),
    /// RMSE and interval coverage of predictions against a truth column.
    Score(ScoreArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fit(a) => commands::fit(a),
        Command::Predict(a) => commands::predict(a),
        Command::Diagnose(a) => commands::diagnose(a),
        Command::Ale(a) => commands::ale(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Score(a) => commands::score(a),
    };
    match result {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            for line in report.lines() {
                // A closed pipe downstream is not an error worth reporting.
                if writeln!(out, "{line}").is_err() {
                    break;
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.code() as u8)
        }
    }
}
