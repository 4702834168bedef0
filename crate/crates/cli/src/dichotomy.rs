//! Exhaustion runs on `T_b` across an α grid: bounded solutions vanish for
//! `α ≤ 1` and persist for `α > 1`.

use std::fmt::Write as _;
use std::fs;
use std::thread;

use liouville_core::exhaustion::{
    check_barrier, dirichlet_exhaustion_with_tol, make_barrier, sandwich_check, BarrierCheck, IterationTrace,
    SandwichReport, TraceStatus,
};
use liouville_core::generators::{build_model_tree, make_potential, ModelTreeSpec, PotentialSpec};
use liouville_core::liouville::check_summability_tree;
use liouville_core::metric::hop_metric;
use liouville_core::Error;

use crate::config::ExperimentConfig;
use crate::CliError;

/// `C0` of the barrier: `(1 + d)^(−α) ≤ d^(−α)`.
const BARRIER_C0: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct AlphaRun {
    pub alpha: f64,
    pub trace: IterationTrace,
    /// `None` for `α ≤ 1`, where no barrier exists.
    pub barrier: Option<BarrierCheck>,
    /// Also `None` when no vertex of the truncation lies beyond `R̂`.
    pub sandwich: Option<SandwichReport>,
    pub summability: &'static str,
}

impl AlphaRun {
    pub fn monotone_ok(&self) -> bool {
        self.trace.all_monotone()
            && self.trace.all_bounded()
            && !matches!(self.trace.status, TraceStatus::MonotonicityViolation { .. })
    }

    pub fn sandwich_ok(&self) -> bool {
        self.sandwich.as_ref().is_none_or(SandwichReport::holds)
    }

    pub fn barrier_ok(&self) -> bool {
        self.barrier.as_ref().is_none_or(BarrierCheck::passed)
    }

    pub fn passed(&self) -> bool {
        self.monotone_ok() && self.sandwich_ok() && self.barrier_ok()
    }
}

#[derive(Debug, Clone)]
pub struct DichotomyOutcome {
    pub runs: Vec<AlphaRun>,
}

impl DichotomyOutcome {
    pub fn passed(&self) -> bool {
        self.runs.iter().all(AlphaRun::passed)
    }
}

/// File-name form of `α`: `0.5`, `1`, `1.5`.
pub fn alpha_label(alpha: f64) -> String {
    format!("{alpha}")
}

fn num(v: f64) -> String {
    // `+ 0.0` folds `-0` into `0`.
    format!("{:.16e}", v + 0.0)
}

fn run_alpha(config: &ExperimentConfig, alpha: f64) -> Result<AlphaRun, CliError> {
    let spec =
        ModelTreeSpec::new(config.tree_b, config.tree_depth, config.measure_c).with_max_vertices(config.max_vertices);
    let tree = build_model_tree(&spec)?;
    let metric = hop_metric(&tree);
    let v = make_potential(&tree, &metric, &PotentialSpec::shifted(alpha))?;
    let trace = dirichlet_exhaustion_with_tol(&tree, &metric, &v, config.gamma, &config.radii, config.tol)?;
    let (barrier, sandwich) = if alpha > 1.0 && config.tree_b >= 2 {
        let h = make_barrier(config.tree_b, alpha, BARRIER_C0, config.measure_c)?;
        let check = check_barrier(&tree, &metric, &v, &h)?;
        // A truncation ending inside the barrier radius leaves nothing to check.
        let sandwich = match sandwich_check(&tree, &metric, &trace, &h, config.gamma) {
            Ok(report) => Some(report),
            Err(Error::RegionEmpty { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        (Some(check), sandwich)
    } else {
        (None, None)
    };
    let summability = check_summability_tree(&spec, config.lambda_cap, alpha)?.verdict.label();
    Ok(AlphaRun {
        alpha,
        trace,
        barrier,
        sandwich,
        summability,
    })
}

/// Runs every α concurrently; results keep the grid order.
pub fn run(config: &ExperimentConfig) -> Result<DichotomyOutcome, CliError> {
    if !(config.alpha_grid.iter().any(|&a| a <= 1.0) && config.alpha_grid.iter().any(|&a| a > 1.0)) {
        return Err(CliError::Config(crate::config::ConfigError::Invalid {
            key: "alpha-grid",
            message: "must contain values on both sides of 1".into(),
        }));
    }
    let results: Vec<Result<AlphaRun, CliError>> = thread::scope(|s| {
        let handles: Vec<_> = config
            .alpha_grid
            .iter()
            .map(|&alpha| s.spawn(move || run_alpha(config, alpha)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(DichotomyOutcome { runs })
}

pub fn summary_csv(outcome: &DichotomyOutcome) -> String {
    let mut out = String::from("alpha,u_final_root,sandwich_lower_bound,summability_verdict\n");
    for r in &outcome.runs {
        let lower = r.sandwich.as_ref().map_or(f64::NAN, |s| s.lower_bound);
        let _ = writeln!(
            out,
            "{},{},{},{}",
            alpha_label(r.alpha),
            num(r.trace.last().root_value),
            num(lower),
            r.summability
        );
    }
    out
}

/// Per-α check results behind the exit code.
pub fn checks_csv(outcome: &DichotomyOutcome) -> String {
    let mut out = String::from(
        "alpha,monotone_ok,bounds_ok,final_sup_delta,sandwich_c,sandwich_margin,barrier_max_ratio,barrier_checked\n",
    );
    for r in &outcome.runs {
        let (c, margin) = r.sandwich.as_ref().map_or((f64::NAN, f64::NAN), |s| (s.c, s.margin));
        let (ratio, checked) = r.barrier.as_ref().map_or((f64::NAN, 0), |b| (b.max_ratio, b.checked));
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            alpha_label(r.alpha),
            r.monotone_ok(),
            r.trace.all_bounded(),
            num(r.trace.last().sup_delta.unwrap_or(f64::NAN)),
            num(c),
            num(margin),
            num(ratio),
            checked
        );
    }
    out
}

/// Writes `trace_alpha_<α>.csv`, `summary.csv` and `checks.csv` into the
/// output directory.
pub fn write_outputs(config: &ExperimentConfig, outcome: &DichotomyOutcome) -> Result<(), CliError> {
    fs::create_dir_all(&config.out_dir)?;
    for r in &outcome.runs {
        let path = config.out_dir.join(format!("trace_alpha_{}.csv", alpha_label(r.alpha)));
        fs::write(path, r.trace.to_csv())?;
    }
    fs::write(config.out_dir.join("summary.csv"), summary_csv(outcome))?;
    fs::write(config.out_dir.join("checks.csv"), checks_csv(outcome))?;
    Ok(())
}

pub fn report_line(r: &AlphaRun) -> String {
    let verdict = |ok: bool| if ok { "ok" } else { "FAILED" };
    let mut line = format!(
        "alpha={} u_root={:.10} monotone={}",
        alpha_label(r.alpha),
        r.trace.last().root_value + 0.0,
        verdict(r.monotone_ok())
    );
    match &r.sandwich {
        Some(s) => {
            let _ = write!(
                line,
                " sandwich={} lower_bound={:.6}",
                verdict(s.holds()),
                s.lower_bound
            );
        }
        None if r.barrier.is_some() => line.push_str(" sandwich=skipped"),
        None => {}
    }
    if r.barrier.is_some() {
        let _ = write!(line, " barrier={}", verdict(r.barrier_ok()));
    }
    let _ = write!(line, " summability={}", r.summability);
    line
}
