//! Batch front end: parse a scenario document, run its queries, and emit a
//! JSON report.
//!
//! Exit codes: 0 on success, 1 on read/parse/validation errors, 2 when an
//! internal consistency check disagrees (always an implementation bug).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use compop::error::Error;
use compop::report::run;
use compop::scenario::{parse_scenario_with, BudgetOverrides};

#[derive(Parser)]
#[command(
    name = "compop",
    about = "Classification, norms, compactness, and topology of composition operators on bounded functions over locally finite rooted spaces",
    version
)]
struct Cli {
    /// Scenario document to execute.
    #[arg(long)]
    scenario: PathBuf,

    /// Output path for the JSON report (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override the scenario's point budget.
    #[arg(long, value_name = "N")]
    budget_points: Option<u64>,

    /// Override the scenario's truncation radius.
    #[arg(long, value_name = "M")]
    radius: Option<u64>,

    /// Override the scenario's witness family size.
    #[arg(long, value_name = "N")]
    family: Option<usize>,

    /// Attach oracle cross-checks to every query.
    #[arg(long)]
    validate: bool,

    /// Reserved for randomized corpus generation; deterministic queries
    /// ignore it.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = cli.seed;

    let document = match fs::read_to_string(&cli.scenario) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.scenario.display());
            return ExitCode::from(1);
        }
    };

    let overrides = BudgetOverrides {
        points: cli.budget_points,
        radius: cli.radius,
        family: cli.family,
    };
    let scenario = match parse_scenario_with(&document, overrides) {
        Ok(scenario) => scenario,
        Err(errors) => {
            for e in errors {
                eprintln!("error: {e}");
            }
            return ExitCode::from(1);
        }
    };

    match run(&scenario, cli.validate) {
        Ok(report) => {
            let json = report.to_json();
            match &cli.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, json) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{json}"),
            }
            ExitCode::SUCCESS
        }
        Err(Error::Internal(diagnostic)) => {
            eprintln!("consistency disagreement: {diagnostic}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
