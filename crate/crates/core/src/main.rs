use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mfg_egta::harness::{self, profile::format_report, HarnessError};

#[derive(Parser)]
#[command(name = "mfg-egta", version, about = "Iterative EGTA and fictitious play for tabular mean field games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write trace.csv, profile.json and chart.svg.
    Solve { config: PathBuf },
    /// Recompute the exploitability of a saved profile.
    Exploitability { profile: PathBuf, config: PathBuf },
    /// Render a regret chart from a trace.
    Chart { trace: PathBuf, out: PathBuf },
}

fn dispatch(cmd: Command) -> Result<(), HarnessError> {
    match cmd {
        Command::Solve { config } => {
            let summary = harness::run(&config)?;
            for r in &summary.runs {
                if let Some(last) = r.trace.last() {
                    println!(
                        "{}: iteration {} total regret {:.9}",
                        r.method, last.iteration, last.total
                    );
                }
            }
            println!("wrote {}", summary.output_dir.display());
        }
        Command::Exploitability { profile, config } => {
            for (method, report) in harness::exploitability_cmd(&profile, &config)? {
                println!("[{method}]");
                print!("{}", format_report(&report));
            }
        }
        Command::Chart { trace, out } => harness::chart_cmd(&trace, &out)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mfg-egta: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
