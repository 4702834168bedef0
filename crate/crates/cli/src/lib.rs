//! Experiments and verification suites behind the `liouville` binary.

pub mod config;
pub mod dichotomy;
pub mod solve;
pub mod verify;

use std::fs;
use std::io::Write;

use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig};
use crate::verify::Fault;

/// Every check passed.
pub const EXIT_OK: i32 = 0;
/// A check failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Bad configuration or input file.
pub const EXIT_INPUT: i32 = 2;
/// Numerical or I/O failure.
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] liouville_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use liouville_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Input(_) => EXIT_INPUT,
            CliError::Core(
                E::TruncationTooShallow(_)
                | E::SizeOverflow { .. }
                | E::InvalidParameter(_)
                | E::Parse { .. }
                | E::HaloContamination { .. }
                | E::NegativePotential { .. }
                | E::InteriorCoversGraph
                | E::RadiusExceedsTruncation { .. }
                | E::RegionEmpty { .. },
            ) => EXIT_INPUT,
            CliError::Core(E::MonotonicityViolation { .. } | E::BarrierCheckFailed { .. }) => EXIT_CHECK_FAILED,
            CliError::Core(_) | CliError::Io(_) => EXIT_RUNTIME,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Dichotomy,
    Verify,
    Solve,
}

/// Runs a command, writing progress to `out`; returns the exit code.
pub fn run(
    command: Command,
    config: &ExperimentConfig,
    fault: Option<Fault>,
    out: &mut impl Write,
) -> Result<i32, CliError> {
    match command {
        Command::Dichotomy => {
            let outcome = dichotomy::run(config)?;
            dichotomy::write_outputs(config, &outcome)?;
            for r in &outcome.runs {
                writeln!(out, "{}", dichotomy::report_line(r))?;
            }
            writeln!(
                out,
                "wrote {} trace files to {}",
                outcome.runs.len(),
                config.out_dir.display()
            )?;
            Ok(if outcome.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Verify => {
            let suites = verify::run(config, fault)?;
            for s in &suites {
                writeln!(out, "{}", s.line())?;
            }
            match suites.iter().find(|s| !s.passed) {
                Some(s) => {
                    writeln!(out, "first failing suite: {}", s.name)?;
                    Ok(EXIT_CHECK_FAILED)
                }
                None => Ok(EXIT_OK),
            }
        }
        Command::Solve => {
            let path = config
                .problem
                .as_ref()
                .ok_or_else(|| CliError::Input("solve needs a problem file".into()))?;
            let solution = solve::solve_file(path, config.max_vertices)?;
            fs::create_dir_all(&config.out_dir)?;
            let target = config.out_dir.join("solution.csv");
            fs::write(&target, solve::solution_csv(&solution))?;
            writeln!(
                out,
                "vertices={} interior={} residual={:.3e} wrote {}",
                solution.problem.graph.len(),
                solution.problem.interior.len(),
                solution.residual,
                target.display()
            )?;
            Ok(EXIT_OK)
        }
    }
}
