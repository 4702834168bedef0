//! Monotone exhaustion by Dirichlet problems on growing balls.
//!
//! Two schemes share one trace type:
//!
//! * limit at infinity: `u_j` solves `ℒu = 0` in `B_j(x0)` with `u = γ`
//!   outside. Then `0 ≤ u_j ≤ γ` and `u_{j+1} ≤ u_j`.
//! * normalization: `v_n` solves `ℒv = 0` in `B_n(p)` with `v = (u − M)_+`
//!   outside. Then `0 ≤ v_n ≤ 1` and `v_n ≤ v_{n+1}`.
//!
//! On model trees the barrier `h = Ĉ d^(−β)` bounds the first scheme from
//! below outside `B_R̂`: `γ − C h ≤ u_j ≤ γ`.

use std::fmt::Write as _;

use crate::dirichlet::{solve, verify_strong_max_principle, DirichletProblem, StrongMaxVerdict};
use crate::error::{Error, Result};
use crate::graph::{VertexField, WeightedGraph};
use crate::metric::{ball, PseudoMetric};

/// Pointwise slack allowed in the bound and monotonicity checks.
pub const CHECK_TOLERANCE: f64 = 1e-12;
/// Monotonicity excess beyond which a run aborts.
pub const ABORT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Nonincreasing,
    Nondecreasing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceStatus {
    Converged { tol: f64 },
    ExhaustedRadii,
    MonotonicityViolation { step: usize, vertex: usize, excess: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub j: usize,
    pub u: VertexField,
    pub root_value: f64,
    /// Sup-norm change on the reference ball; `None` on the first step.
    pub sup_delta: Option<f64>,
    pub min_over_ball: f64,
    pub max_over_ball: f64,
    pub monotone_ok: bool,
    /// Pointwise bounds `0 ≤ u ≤ upper` over all vertices.
    pub bounds_ok: bool,
    /// Most negative of `u` and `upper − u` over all vertices.
    pub bound_margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub mode: Monotonicity,
    /// `γ` for the limit scheme, `M` for normalization.
    pub parameter: f64,
    pub center: usize,
    pub steps: Vec<TraceStep>,
    /// Ball of the smallest radius; sup deltas are taken over it.
    pub reference_ball: Vec<usize>,
    pub status: TraceStatus,
}

impl IterationTrace {
    pub fn last(&self) -> &TraceStep {
        self.steps.last().expect("trace has at least one step")
    }

    pub fn step(&self, j: usize) -> Option<&TraceStep> {
        self.steps.iter().find(|s| s.j == j)
    }

    pub fn all_monotone(&self) -> bool {
        self.steps.iter().all(|s| s.monotone_ok)
    }

    pub fn all_bounded(&self) -> bool {
        self.steps.iter().all(|s| s.bounds_ok)
    }

    /// CSV with columns `j,root_value,sup_delta,min_over_ball,max_over_ball,monotone_ok`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,root_value,sup_delta,min_over_ball,max_over_ball,monotone_ok\n");
        for s in &self.steps {
            let delta = s.sup_delta.map_or("NaN".to_string(), |d| format!("{d:.16e}"));
            let _ = writeln!(
                out,
                "{},{:.16e},{},{:.16e},{:.16e},{}",
                s.j, s.root_value, delta, s.min_over_ball, s.max_over_ball, s.monotone_ok
            );
        }
        out
    }
}

fn check_radii(radii: &[usize]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("radii schedule is empty".into()));
    }
    if radii[0] == 0 || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "radii must be positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Balls `B_j(center)` for every radius, refusing any that reaches the halo
/// or leaves no non-halo exterior.
fn schedule_balls(
    graph: &WeightedGraph,
    metric: &PseudoMetric,
    center: usize,
    radii: &[usize],
) -> Result<Vec<Vec<usize>>> {
    check_radii(radii)?;
    let non_halo = graph.non_halo().count();
    radii
        .iter()
        .map(|&j| {
            let too_shallow = || {
                let depth = graph.truncation().unwrap_or(graph.max_hop());
                Error::TruncationTooShallow(format!(
                    "ball of radius {j} does not fit inside the truncation of depth {depth}"
                ))
            };
            let b = ball(graph, metric, center, j as f64).map_err(|e| match e {
                Error::RadiusExceedsTruncation { .. } => too_shallow(),
                other => other,
            })?;
            if b.len() == non_halo {
                return Err(too_shallow());
            }
            Ok(b)
        })
        .collect()
}

struct Runner {
    mode: Monotonicity,
    upper: f64,
    reference: Vec<usize>,
    center: usize,
    steps: Vec<TraceStep>,
    violation: Option<TraceStatus>,
}

impl Runner {
    fn push(&mut self, j: usize, interior: &[usize], u: VertexField) -> Result<()> {
        let mut monotone_ok = true;
        let mut sup_delta = None;
        if let Some(prev) = self.steps.last() {
            let mut worst = (0.0f64, 0usize);
            for x in 0..u.len() {
                let excess = match self.mode {
                    Monotonicity::Nonincreasing => u[x] - prev.u[x],
                    Monotonicity::Nondecreasing => prev.u[x] - u[x],
                };
                if excess > worst.0 {
                    worst = (excess, x);
                }
            }
            if worst.0 > ABORT_TOLERANCE {
                return Err(Error::MonotonicityViolation {
                    step: j,
                    vertex: worst.1,
                    excess: worst.0,
                });
            }
            if worst.0 > CHECK_TOLERANCE {
                monotone_ok = false;
                self.violation.get_or_insert(TraceStatus::MonotonicityViolation {
                    step: j,
                    vertex: worst.1,
                    excess: worst.0,
                });
            }
            sup_delta = Some(
                self.reference
                    .iter()
                    .map(|&x| (u[x] - prev.u[x]).abs())
                    .fold(0.0, f64::max),
            );
        }
        let bound_margin = u
            .values()
            .iter()
            .map(|&v| v.min(self.upper - v))
            .fold(f64::INFINITY, f64::min);
        let (lo, hi) = interior
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(u[x]), hi.max(u[x]))
            });
        self.steps.push(TraceStep {
            j,
            root_value: u[self.center],
            sup_delta,
            min_over_ball: lo,
            max_over_ball: hi,
            monotone_ok,
            bounds_ok: bound_margin >= -CHECK_TOLERANCE,
            bound_margin,
            u,
        });
        Ok(())
    }

    fn finish(self, parameter: f64, tol: f64) -> IterationTrace {
        let status = match self.violation {
            Some(v) => v,
            None => match self.steps.last().and_then(|s| s.sup_delta) {
                Some(d) if d < tol => TraceStatus::Converged { tol },
                _ => TraceStatus::ExhaustedRadii,
            },
        };
        IterationTrace {
            mode: self.mode,
            parameter,
            center: self.center,
            steps: self.steps,
            reference_ball: self.reference,
            status,
        }
    }
}

/// Limit scheme: `ℒu_j = 0` in `B_j(x0)`, `u_j = γ` outside, for each `j`
/// in `radii`.
pub fn dirichlet_exhaustion(
    graph: &WeightedGraph,
    metric: &PseudoMetric,
    potential: &VertexField,
    gamma: f64,
    radii: &[usize],
) -> Result<IterationTrace> {
    dirichlet_exhaustion_with_tol(graph, metric, potential, gamma, radii, DEFAULT_CONVERGENCE_TOL)
}

pub fn dirichlet_exhaustion_with_tol(
    graph: &WeightedGraph,
    metric: &PseudoMetric,
    potential: &VertexField,
    gamma: f64,
    radii: &[usize],
    tol: f64,
) -> Result<IterationTrace> {
    graph.check_field(potential)?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {gamma}")));
    }
    if let Some(x) = graph.non_halo().find(|&x| !(potential[x] > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "potential must be positive, V({x}) = {}",
            potential[x]
        )));
    }
    let balls = schedule_balls(graph, metric, graph.root(), radii)?;
    let mut runner = Runner {
        mode: Monotonicity::Nonincreasing,
        upper: gamma,
        reference: balls[0].clone(),
        center: graph.root(),
        steps: Vec::with_capacity(radii.len()),
        violation: None,
    };
    let exterior = VertexField::constant(graph.len(), gamma);
    for (&j, interior) in radii.iter().zip(&balls) {
        let problem = DirichletProblem::homogeneous(graph, potential, interior.iter().copied(), exterior.clone())?;
        runner.push(j, interior, solve(&problem)?)?;
    }
    Ok(runner.finish(gamma, tol))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Normalized {
    /// `v = sgn(u) u`, with its strong maximum principle verdict.
    ConstantSign {
        v: VertexField,
        verdict: StrongMaxVerdict,
    },
    Exhaustion(IterationTrace),
}

/// Turns a bounded solution with `sup |u| ≤ 1` into one with `0 ≤ v ≤ 1`.
///
/// Without `m` the input must have constant sign and is returned as `|u|`.
/// With `m` the exhaustion runs on balls around `p` with exterior data
/// `(u − M)_+`, which requires `0 < M < sup u_+`.
pub fn normalize_bounded_solution(
    graph: &WeightedGraph,
    metric: &PseudoMetric,
    potential: &VertexField,
    u: &VertexField,
    p: usize,
    m: Option<f64>,
    radii: &[usize],
) -> Result<Normalized> {
    graph.check_field(potential)?;
    graph.check_field(u)?;
    let sup = u.sup_norm();
    if sup == 0.0 {
        return Err(Error::TrivialInput);
    }
    if sup > 1.0 + CHECK_TOLERANCE {
        return Err(Error::InvalidParameter(format!(
            "sup |u| = {sup} exceeds 1; rescale first"
        )));
    }
    let Some(m) = m else {
        let nonneg = u.values().iter().all(|&v| v >= 0.0);
        let nonpos = u.values().iter().all(|&v| v <= 0.0);
        if !(nonneg || nonpos) {
            return Err(Error::InvalidParameter("sign-changing input needs a level M".into()));
        }
        let v = if nonneg { u.clone() } else { u.scaled(-1.0) };
        let verdict = verify_strong_max_principle(graph, potential, &v)?;
        return Ok(Normalized::ConstantSign { v, verdict });
    };
    let sup_pos = u.values().iter().copied().fold(0.0, f64::max);
    if !(m > 0.0 && m < sup_pos) {
        return Err(Error::BadM { m, sup_pos });
    }
    if p >= graph.len() {
        return Err(Error::VertexOutOfRange {
            vertex: p,
            n: graph.len(),
        });
    }
    let balls = schedule_balls(graph, metric, p, radii)?;
    let exterior = u.map(|v| (v - m).max(0.0));
    let mut runner = Runner {
        mode: Monotonicity::Nondecreasing,
        upper: 1.0,
        reference: balls[0].clone(),
        center: p,
        steps: Vec::with_capacity(radii.len()),
        violation: None,
    };
    for (&n, interior) in radii.iter().zip(&balls) {
        let problem = DirichletProblem::homogeneous(graph, potential, interior.iter().copied(), exterior.clone())?;
        runner.push(n, interior, solve(&problem)?)?;
    }
    Ok(Normalized::Exhaustion(runner.finish(m, DEFAULT_CONVERGENCE_TOL)))
}

/// `h = Ĉ d^(−β)` on `{d > R̂}`, a supersolution at infinity for potentials
/// bounded by `C0 d^(−α)` on the model tree `T_b` with `μ ≡ μ_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Barrier {
    pub branching: usize,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub r_hat: usize,
    pub c_hat: f64,
    pub c0: f64,
    pub measure: f64,
}

/// Tolerance on `(1/V) Δh ≤ −1`.
pub const BARRIER_TOLERANCE: f64 = 1e-10;
/// Radial levels beyond `R̂` checked by [`make_barrier`].
pub const BARRIER_REFERENCE_LEVELS: usize = 256;

impl Barrier {
    pub fn eval(&self, d: f64) -> f64 {
        self.c_hat * d.powf(-self.beta)
    }

    /// `(1/V) Δh` at hop level `d ≥ 1` of `T_b` with `V = C0 d^(−α)`, the
    /// largest potential the barrier is built for.
    pub fn radial_ratio(&self, d: usize) -> f64 {
        let b = self.branching as f64;
        let df = d as f64;
        let h = self.eval(df);
        let lap = (b * (self.eval(df + 1.0) - h) + (self.eval(df - 1.0) - h)) / self.measure;
        lap / (self.c0 * df.powf(-self.alpha))
    }
}

pub fn make_barrier(branching: usize, alpha: f64, c0: f64, measure: f64) -> Result<Barrier> {
    if branching < 2 {
        return Err(Error::BranchingTooSmall { b: branching });
    }
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::AlphaNotSupercritical { alpha });
    }
    if !(c0 > 0.0 && c0.is_finite()) || !(measure > 0.0 && measure.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "C0 and measure must be positive, got {c0}, {measure}"
        )));
    }
    let epsilon = (2.0 * branching as f64 - 3.0) / 3.0;
    let beta = alpha - 1.0;
    let mut r_hat = 2usize;
    while (1.0 + 1.0 / r_hat as f64).powf(beta + 1.0) >= 1.0 + epsilon {
        r_hat += 1;
    }
    let c_hat = 2.0 * c0 * measure / ((r_hat as f64).powf(alpha - beta - 1.0) * beta);
    let barrier = Barrier {
        branching,
        alpha,
        beta,
        epsilon,
        r_hat,
        c_hat,
        c0,
        measure,
    };
    for d in r_hat + 1..=r_hat + BARRIER_REFERENCE_LEVELS {
        let value = barrier.radial_ratio(d);
        if value > -1.0 + BARRIER_TOLERANCE {
            return Err(Error::BarrierCheckFailed {
                distance: d as f64,
                value,
            });
        }
    }
    Ok(barrier)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierCheck {
    /// Number of non-halo vertices with `d > R̂`.
    pub checked: usize,
    /// Largest `(1/V) Δh`, `−∞` when nothing was checked.
    pub max_ratio: f64,
    pub worst_vertex: Option<usize>,
}

impl BarrierCheck {
    pub fn passed(&self) -> bool {
        self.max_ratio <= -1.0 + BARRIER_TOLERANCE
    }
}

/// `(1/V(x)) Δh(x)` by direct neighbor summation at every non-halo vertex
/// with `d(x, x0) > R̂`.
pub fn check_barrier(
    graph: &WeightedGraph,
    metric: &PseudoMetric,
    potential: &VertexField,
    barrier: &Barrier,
) -> Result<BarrierCheck> {
    graph.check_field(potential)?;
    let r_hat = barrier.r_hat as f64;
    let mut report = BarrierCheck {
        checked: 0,
        max_ratio: f64::NEG_INFINITY,
        worst_vertex: None,
    };
    for x in graph.non_halo() {
        let d = metric.from_root(x);
        if d <= r_hat {
            continue;
        }
        let h = barrier.eval(d);
        let sum: f64 = graph
            .neighbors(x)
            .iter()
            .map(|nb| nb.weight * (barrier.eval(metric.from_root(nb.vertex)) - h))
            .sum();
        let ratio = sum / graph.measure(x) / potential[x];
        report.checked += 1;
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.worst_vertex = Some(x);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichReport {
    pub c: f64,
    /// `min_x u(x) − (γ − C h(x))` over the region.
    pub margin: f64,
    pub margin_vertex: usize,
    /// `max_x u(x) − γ` over the region.
    pub upper_excess: f64,
    /// `γ − C h` on the first shell `d = R̂ + 1`.
    pub lower_bound: f64,
    pub checked: usize,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.margin >= 0.0 && self.upper_excess <= CHECK_TOLERANCE
    }
}

/// Constant of the lower bound: the interior inequality needs `C ≥ γ`, the
/// inner boundary `d = R̂` needs `C h(R̂) ≥ γ`.
pub fn sandwich_constant(barrier: &Barrier, gamma: f64) -> f64 {
    let inner = gamma * (barrier.r_hat as f64).powf(barrier.beta) / barrier.c_hat;
    gamma.max(inner) * (1.0 + 1e-6)
}

/// `γ − C h(x) ≤ u(x) ≤ γ` for the last iterate of `trace`, at every
/// non-halo vertex with `d(x, x0) > R̂`.
pub fn sandwich_check(
    graph: &WeightedGraph,
    metric: &PseudoMetric,
    trace: &IterationTrace,
    barrier: &Barrier,
    gamma: f64,
) -> Result<SandwichReport> {
    let u = &trace.last().u;
    graph.check_field(u)?;
    let r_hat = barrier.r_hat as f64;
    let c = sandwich_constant(barrier, gamma);
    let mut report = SandwichReport {
        c,
        margin: f64::INFINITY,
        margin_vertex: graph.root(),
        upper_excess: f64::NEG_INFINITY,
        lower_bound: gamma - c * barrier.eval(r_hat + 1.0),
        checked: 0,
    };
    for x in graph.non_halo() {
        let d = metric.from_root(x);
        if d <= r_hat {
            continue;
        }
        report.checked += 1;
        let margin = u[x] - (gamma - c * barrier.eval(d));
        if margin < report.margin {
            report.margin = margin;
            report.margin_vertex = x;
        }
        report.upper_excess = report.upper_excess.max(u[x] - gamma);
    }
    if report.checked == 0 {
        return Err(Error::RegionEmpty { radius: r_hat });
    }
    Ok(report)
}
