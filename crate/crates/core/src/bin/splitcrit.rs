use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use splitcrit::pipeline::{emit_report, exit, run_document, Format, Mode, Overrides, VerdictReport};

/// Decide splitting of mod-p Galois representations from job documents.
#[derive(Debug, Parser)]
#[command(name = "splitcrit", version)]
struct Cli {
    /// Computation to run; must agree with the document's `mode` if present.
    #[arg(value_enum)]
    mode: Mode,
    /// Path to the JSON job document.
    #[arg(long)]
    job: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Working π-adic precision M (overrides the document).
    #[arg(long)]
    precision: Option<usize>,
    /// Working residue degree (overrides the document).
    #[arg(long = "n-work")]
    n_work: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match std::fs::read(&cli.job) {
        Ok(bytes) => {
            let base = cli.job.parent().map(PathBuf::from).unwrap_or_default();
            let overrides = Overrides { precision: cli.precision, n_work: cli.n_work };
            run_document(&bytes, Some(cli.mode), &base, overrides)
        }
        Err(e) => {
            let mut report = VerdictReport::new(Some(cli.mode), String::new());
            report.fail(format!("cannot read {}: {e}", cli.job.display()));
            splitcrit::pipeline::RunOutcome { report, exit_code: exit::PARSE }
        }
    };
    if let Some(reason) = &outcome.report.failure_reason {
        eprintln!("splitcrit: {reason}");
    }
    let mut out = std::io::stdout().lock();
    if out.write_all(emit_report(&outcome.report, cli.format).as_bytes()).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(exit::PRECONDITION as u8);
    }
    ExitCode::from(outcome.exit_code as u8)
}
