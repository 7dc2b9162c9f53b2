//! `normplane`: norm inspection, bisector tracing, constant derivation,
//! curve generation and verification, batch certificates and SVG plots.
//!
//! Every report is JSON on stdout (or `--report PATH`, written atomically)
//! and ends with a `config` object echoing the parsed options. Exit codes:
//! 0 success, 1 a check failed, 2 invalid input or I/O error.

mod commands;
mod csvio;
mod error;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::commands::*;
use crate::error::{CliError, CliResult};
use crate::output::{to_json_string, to_value, write_atomic};

#[derive(Parser, Debug)]
#[command(name = "normplane", version, about = "Geometry of strictly convex planar norms and self-contracted curves")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize, Debug)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// α₀, κ and the derived constants of a norm.
    NormInfo(NormInfoArgs),
    /// Minimal normal/radius angle α₀ with a grid-doubling check.
    Alpha0(Alpha0Args),
    /// Strip constant κ.
    Kappa(KappaArgs),
    /// Trace the bisector of a segment.
    Bisector(BisectorArgs),
    /// Generate a curve CSV.
    Generate(GenerateArgs),
    /// Check that a curve CSV is self-contracted.
    Verify(VerifyArgs),
    /// Pair certificates, width decrement and length bound for curves.
    Certify(CertifyArgs),
    /// Length, diameter and mean width against the certified constant.
    BoundReport(BoundReportArgs),
    /// Static SVG figures.
    Plot(PlotArgs),
}

fn run(cli: &Cli) -> CliResult<Option<String>> {
    let outcome = match &cli.command {
        Command::NormInfo(a) => norm_info(a),
        Command::Alpha0(a) => alpha0(a),
        Command::Kappa(a) => kappa(a),
        Command::Bisector(a) => bisector(a),
        Command::Generate(a) => generate(a),
        Command::Verify(a) => verify(a),
        Command::Certify(a) => certify(a),
        Command::BoundReport(a) => bound_report(a),
        Command::Plot(a) => plot(a),
    }?;
    let mut report = outcome.report;
    if let Value::Object(m) = &mut report {
        m.insert("config".into(), to_value(&cli.command));
    }
    let text = to_json_string(&report);
    match &cli.report {
        Some(p) => write_atomic(p, text.as_bytes())
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(outcome.failure)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("normplane: check failed: {failure}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("normplane: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
