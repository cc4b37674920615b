//! `waycheck`: command-line checks for measuring processes under conservation laws.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for invalid
//! input or I/O errors.

pub mod commands;
pub mod json;
pub mod report;
pub mod schema;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use way_core::models::DimChoice;

use crate::commands::{EnsembleArgs, GlobalOpts};
use crate::report::{ReportBody, ReportFile};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "waycheck",
    version,
    about = "Check measuring processes against conservation-law noise bounds"
)]
pub struct Cli {
    /// Validation tolerance for Hermiticity, unitarity and boolean verdicts.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for every randomized path.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Format written to stdout.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
    /// Also write the JSON report to this path.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Preciseness, nondisturbance, Araki–Yanase, repeatability, conservation and Yanase checks.
    Validate {
        /// Model file in JSON.
        model: PathBuf,
    },
    /// ε² against both noise lower bounds for each multiplicative pair.
    Bound {
        /// Model file in JSON.
        model: PathBuf,
        /// Evaluate only this ψ index.
        #[arg(long, conflicts_with = "all")]
        psi: Option<usize>,
        /// Evaluate every ψ (default).
        #[arg(long)]
        all: bool,
    },
    /// Random conserving ensemble through the bound and contrapositive suite.
    Ensemble {
        /// `AxB` for fixed factor dimensions, `MIN-MAX` for a uniform range.
        #[arg(long, value_parser = commands::parse_dims, default_value = "2-4")]
        dims: DimChoice,
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Build meters that commute with |L2|.
        #[arg(long)]
        yanase: bool,
        /// Haar states per model in addition to the computational basis.
        #[arg(long, default_value_t = 20)]
        states: usize,
        /// Write every generated model file into this directory.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Probe distribution minimizing R for a given L2.
    Optimize {
        /// Model file in JSON.
        #[arg(required_unless_present = "l2_spec")]
        model: Option<PathBuf>,
        /// Diagonal L2, e.g. `diag:1,2,5`.
        #[arg(long, conflicts_with = "model")]
        l2_spec: Option<String>,
        /// Conserved pair of the model file whose L2 is used.
        #[arg(long, default_value_t = 0)]
        pair: usize,
    },
}

/// Runs a parsed command and returns its report body.
pub fn execute(cli: &Cli) -> Result<ReportBody> {
    let opts = GlobalOpts {
        tol: cli.tol,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Validate { model } => commands::validate(model, &opts),
        Command::Bound { model, psi, .. } => commands::bound(model, *psi, &opts),
        Command::Ensemble {
            dims,
            count,
            yanase,
            states,
            export,
        } => commands::ensemble(
            &EnsembleArgs {
                dims: *dims,
                count: *count,
                yanase: *yanase,
                states: *states,
                export: export.clone(),
            },
            &opts,
        ),
        Command::Optimize {
            model,
            l2_spec,
            pair,
        } => commands::optimize(model.as_deref(), l2_spec.as_deref(), *pair, &opts),
    }
}

fn emit(cli: &Cli, body: ReportBody, out: &mut dyn Write) -> Result<i32> {
    let passed = body.passed();
    let report = ReportFile::new(body);
    if let Some(path) = &cli.report {
        fs::write(path, report.to_pretty_json())
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    let text = match cli.output {
        OutputFormat::Json => report.to_pretty_json(),
        OutputFormat::Text => report.to_text(),
    };
    out.write_all(text.as_bytes())
        .context("cannot write output")?;
    Ok(if passed { EXIT_PASS } else { EXIT_CHECK_FAILED })
}

/// Parses `args` (including the program name), writes to the given streams
/// and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_INPUT_ERROR
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_PASS
            };
        }
    };
    match execute(&cli).and_then(|body| emit(&cli, body, out)) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_INPUT_ERROR
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        args,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
