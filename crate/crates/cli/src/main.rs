use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liouville_cli::config::{parse_alpha_grid, parse_radii, ExperimentConfig, Overrides, MAX_VERTICES_ENV};
use liouville_cli::verify::Fault;
use liouville_cli::{run, Command, EXIT_INPUT};

#[derive(Parser)]
#[command(
    name = "liouville",
    version,
    about = "Bounded solutions of Δu − Vu = 0 on weighted graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exhaustion runs across the α grid; writes trace and summary CSVs.
    Dichotomy,
    /// Runs every verification suite.
    Verify,
    /// Solves the Dirichlet problem of a problem file.
    Solve {
        /// Problem file; overrides `problem` from the config.
        problem: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    NegateLaplacian,
}

#[derive(Args)]
struct Flags {
    /// `key = value` config file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    tree_b: Option<usize>,
    #[arg(long, global = true)]
    tree_depth: Option<usize>,
    #[arg(long, global = true)]
    measure_c: Option<f64>,
    /// Comma separated, e.g. `0.5,1,1.5,2`.
    #[arg(long, global = true)]
    alpha_grid: Option<String>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Λ of the summability condition.
    #[arg(long, global = true)]
    lambda_cap: Option<f64>,
    /// λ of the test functions.
    #[arg(long, global = true)]
    lambda_xi: Option<f64>,
    /// Comma separated radii or ranges, e.g. `2..12`.
    #[arg(long, global = true)]
    radii: Option<String>,
    /// Stabilization tolerance of the exhaustion traces.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, hide = true)]
    inject_fault: Option<FaultArg>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let f = cli.flags;
    let (command, problem) = match cli.command {
        Cmd::Dichotomy => (Command::Dichotomy, None),
        Cmd::Verify => (Command::Verify, None),
        Cmd::Solve { problem } => (Command::Solve, problem),
    };
    let lists = (
        f.alpha_grid.as_deref().map(parse_alpha_grid).transpose(),
        f.radii.as_deref().map(parse_radii).transpose(),
    );
    let (alpha_grid, radii) = match lists {
        (Ok(a), Ok(r)) => (a, r),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let overrides = Overrides {
        tree_b: f.tree_b,
        tree_depth: f.tree_depth,
        measure_c: f.measure_c,
        alpha_grid,
        gamma: f.gamma,
        lambda_cap: f.lambda_cap,
        lambda_xi: f.lambda_xi,
        radii,
        tol: f.tol,
        out_dir: f.out_dir,
        seed: f.seed,
        problem,
    };
    let env = std::env::var(MAX_VERTICES_ENV).ok();
    let config = match ExperimentConfig::load(f.config.as_deref(), &overrides, env.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let fault = f.inject_fault.map(|FaultArg::NegateLaplacian| Fault::NegateLaplacian);
    let mut stdout = std::io::stdout().lock();
    match run(command, &config, fault, &mut stdout) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
