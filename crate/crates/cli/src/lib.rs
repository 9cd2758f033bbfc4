//! Command-line front end: scenario loading, dispatch and report output.
//!
//! Exit codes: 0 all checks pass, 2 certified infeasibility, 3 numerical
//! failure (a check failed or a solver gave up), 4 configuration error.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod report;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Command, ConfigError, Overrides, Scenario, Source};
use crate::report::{Format, Report, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "lcslab", version, about = "Locally conformally symplectic structures: scenarios and checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Principal eigenpair of an elliptic operator on a flat torus.
    PerronEig(RunArgs),
    /// Search for a taming twist class of the lcs pipeline.
    LcsFind(RunArgs),
    /// Invariant taming / lcK scan on the Inoue surface.
    InoueVerify(RunArgs),
    /// Pointwise identities for the Hopf potential family.
    HopfFamily(RunArgs),
    /// Invariant twisted cohomology ranks of a Lie algebra model.
    Cohomology(RunArgs),
    /// Refinement and identity studies.
    Identities(RunArgs),
    /// List the bundled scenarios.
    Scenarios,
    /// Print a bundled scenario as JSON.
    Show { name: String },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Scenario file (JSON object).
    #[arg(long, conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// Bundled scenario name; defaults to the first one for the command.
    #[arg(long)]
    scenario: Option<String>,
    /// Output directory.
    #[arg(long, env = "LCSLAB_OUT_DIR", default_value = "lcslab-out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Override the grid size `n`.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Override the eigen-solver tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "json,csv")]
    format: Vec<Format>,
    /// Suppress the per-check summary.
    #[arg(long)]
    quiet: bool,
}

fn load(command: Command, a: &RunArgs) -> Result<Scenario, ConfigError> {
    let (mut s, src): (Scenario, Source) = match (&a.config, &a.scenario) {
        (Some(p), _) => config::load_file(p)?,
        (None, Some(name)) => config::from_catalog(name)?,
        (None, None) => config::default_for(command)?,
    };
    s.apply(
        &Overrides {
            seed: a.seed,
            grid_n: a.grid_n,
            tol: a.tol,
        },
        &src,
    )?;
    s.validate(command, &src)?;
    Ok(s)
}

/// Report for a run that stopped with a solver error.
fn failure_report(s: &Scenario, status: Status, reason: String) -> Report {
    Report {
        scenario: s.name.clone(),
        command: s.command.as_str().into(),
        description: s.description.clone(),
        seed: s.seed,
        grid: s.grid,
        tol: s.tol,
        status,
        reason: Some(reason),
        checks: Vec::new(),
        passed: false,
        results: serde_json::Value::Null,
        tables: Vec::new(),
        plot: None,
    }
}

fn run_scenario(command: Command, a: &RunArgs) -> i32 {
    let s = match load(command, a) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let report = match commands::run(&s) {
        Ok(r) => r,
        Err(e) if commands::is_infeasibility(&e) => failure_report(&s, Status::Infeasible, e.to_string()),
        Err(e) => failure_report(&s, Status::NumericalFailure, e.to_string()),
    };
    match report::write(&report, &a.out, &a.format) {
        Ok(files) => {
            if !a.quiet {
                println!("{}", report::summary(&report));
                for f in files {
                    println!("wrote {}", f.display());
                }
            }
        }
        Err(e) => {
            eprintln!("error: cannot write reports to {}: {e}", a.out.display());
            return EXIT_NUMERICAL;
        }
    }
    report.status.exit_code()
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match cli.cmd {
        Cmd::PerronEig(a) => run_scenario(Command::PerronEig, &a),
        Cmd::LcsFind(a) => run_scenario(Command::LcsFind, &a),
        Cmd::InoueVerify(a) => run_scenario(Command::InoueVerify, &a),
        Cmd::HopfFamily(a) => run_scenario(Command::HopfFamily, &a),
        Cmd::Cohomology(a) => run_scenario(Command::Cohomology, &a),
        Cmd::Identities(a) => run_scenario(Command::Identities, &a),
        Cmd::Scenarios => {
            for s in config::catalog() {
                println!("{:<20} {:<13} {}", s.name, s.command.as_str(), s.description);
            }
            EXIT_OK
        }
        Cmd::Show { name } => match config::from_catalog(&name) {
            Ok((s, _)) => {
                println!("{}", serde_json::to_string_pretty(&s).expect("scenarios serialize"));
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_CONFIG
            }
        },
    }
}
