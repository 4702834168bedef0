//! Hypothesis checks and numerical verification of the inequalities behind
//! the Liouville property for `Δu − Vu = 0` with `V ≳ d^(−α)`, `α ≤ 1`.
//!
//! * potential lower bound `V(x) ≥ c0 d(x, x0)^(−α)` outside `B_R0(x0)`;
//! * volume summability `Σ_{x∉B_1} e^(−Λ d^α) μ(x) < ∞`;
//! * the test functions `ξ(x, t) = −M ρ(x)/(λT − t)` with
//!   `ρ = max(d^β, r^β)`, and the cut-off
//!   `η = min(2 [r1 − s − d]_+ / r1, 1)`;
//! * the pointwise inequalities satisfied by `ξ` and `η`, the subsolution
//!   property of `v_+` for `v = e^t u − 1`, and the energy estimate that
//!   combines them.

use std::fmt::Write as _;

use crate::dirichlet::RESIDUAL_TOLERANCE;
use crate::error::{Error, Result};
use crate::generators::ModelTreeSpec;
use crate::graph::{laplacian_unchecked, VertexField, WeightedGraph};
use crate::metric::PseudoMetric;

/// One evaluated sample of a pointwise check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckRow {
    pub vertex: usize,
    pub t: f64,
    pub value: f64,
}

/// Outcome of a pointwise inequality check `value ≤ tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub tolerance: f64,
    pub max_slack: f64,
    pub worst: Option<CheckRow>,
    pub evaluated: usize,
    pub skipped: usize,
    /// Vertices where a hypothesis of the check was found unmet.
    pub flagged: Vec<usize>,
    pub rows: Vec<CheckRow>,
}

impl CheckReport {
    fn new(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            tolerance,
            max_slack: f64::NEG_INFINITY,
            worst: None,
            evaluated: 0,
            skipped: 0,
            flagged: Vec::new(),
            rows: Vec::new(),
        }
    }

    fn record(&mut self, row: CheckRow) {
        self.evaluated += 1;
        if row.value > self.max_slack {
            self.max_slack = row.value;
            self.worst = Some(row);
        }
        self.rows.push(row);
    }

    pub fn passed(&self) -> bool {
        self.max_slack <= self.tolerance
    }

    pub fn summary_line(&self) -> String {
        summary_line(&self.name, self.passed(), self.max_slack)
    }

    /// CSV with columns `vertex,t,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("vertex,t,value\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{:.16e},{:.16e}", r.vertex, r.t, r.value);
        }
        out
    }
}

/// `check=<name> status=<pass|fail> max_slack=<value>`.
pub fn summary_line(name: &str, passed: bool, max_slack: f64) -> String {
    let status = if passed { "pass" } else { "fail" };
    format!("check={name} status={status} max_slack={max_slack:.6e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialBound {
    pub alpha: f64,
    /// `(R0, c0(R0))` for `R0 = 1, 2, 4, …` while the region is nonempty,
    /// with `c0(R0) = min V(x) d^α(x)` over non-halo `x` with `d(x) ≥ R0`.
    pub scan: Vec<(f64, f64)>,
    pub c0: f64,
    pub r0: f64,
    /// Vertex on the outermost shell where `V d^α` dips strictly below its
    /// minimum over the inner half: the infimum is decaying.
    pub witness: Option<usize>,
}

impl PotentialBound {
    pub fn holds(&self) -> bool {
        self.witness.is_none() && self.c0 > 0.0
    }
}

pub fn check_potential_bound(
    graph: &WeightedGraph,
    metric: &PseudoMetric,
    potential: &VertexField,
    alpha: f64,
) -> Result<PotentialBound> {
    graph.check_field(potential)?;
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
    }
    let samples: Vec<(usize, f64, f64)> = graph
        .non_halo()
        .map(|x| {
            let d = metric.from_root(x);
            (x, d, potential[x] * d.powf(alpha))
        })
        .collect();
    let d_max = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    let mut scan = Vec::new();
    let mut r0 = 1.0;
    while r0 <= d_max {
        let c0 = samples
            .iter()
            .filter(|s| s.1 >= r0)
            .map(|s| s.2)
            .fold(f64::INFINITY, f64::min);
        scan.push((r0, c0));
        r0 *= 2.0;
    }
    let (r0, c0) = scan.first().copied().unwrap_or((1.0, 0.0));

    let mut witness = None;
    let region: Vec<&(usize, f64, f64)> = samples.iter().filter(|s| s.1 >= r0).collect();
    if let Some(&&(x, d, value)) = region.iter().min_by(|a, b| a.2.total_cmp(&b.2)) {
        let inner = region
            .iter()
            .filter(|s| s.1 <= d_max / 2.0)
            .map(|s| s.2)
            .fold(f64::INFINITY, f64::min);
        if d == d_max && value < inner {
            witness = Some(x);
        }
    }
    Ok(PotentialBound {
        alpha,
        scan,
        c0,
        r0,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Summability {
    /// `sum` is the value of the series when it is known.
    Converges {
        sum: Option<f64>,
    },
    Diverges,
    Inconclusive {
        partial_sums: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummabilityReport {
    pub verdict: Summability,
    /// `lim_n b e^(−Λ((n+1)^α − n^α))` on model trees.
    pub limit_ratio: Option<f64>,
}

impl Summability {
    pub fn label(&self) -> &'static str {
        match self {
            Summability::Converges { .. } => "converges",
            Summability::Diverges => "diverges",
            Summability::Inconclusive { .. } => "inconclusive",
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidLambda(lambda));
    }
    Ok(())
}

/// On `T_b` with `μ ≡ c` the series is `c Σ_{n≥1} b^n e^(−Λ n^α)`; decided by
/// the limit of the term ratio.
pub fn check_summability_tree(spec: &ModelTreeSpec, lambda: f64, alpha: f64) -> Result<SummabilityReport> {
    check_lambda(lambda)?;
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
    }
    let b = spec.branching as f64;
    let c = spec.measure;
    let limit_ratio = if alpha > 1.0 {
        0.0
    } else if alpha == 1.0 {
        b * (-lambda).exp()
    } else {
        b
    };
    let verdict = if limit_ratio < 1.0 {
        Summability::Converges {
            sum: Some(tree_series_sum(b, c, lambda, alpha)),
        }
    } else if limit_ratio > 1.0 {
        Summability::Diverges
    } else {
        Summability::Inconclusive {
            partial_sums: tree_partial_sums(b, c, lambda, alpha, 64),
        }
    };
    Ok(SummabilityReport {
        verdict,
        limit_ratio: Some(limit_ratio),
    })
}

fn tree_term_ln(b: f64, c: f64, lambda: f64, alpha: f64, n: usize) -> f64 {
    let nf = n as f64;
    c.ln() + nf * b.ln() - lambda * nf.powf(alpha)
}

fn tree_partial_sums(b: f64, c: f64, lambda: f64, alpha: f64, count: usize) -> Vec<f64> {
    let mut acc = 0.0;
    (1..=count)
        .map(|n| {
            acc += tree_term_ln(b, c, lambda, alpha, n).exp();
            acc
        })
        .collect()
}

fn tree_series_sum(b: f64, c: f64, lambda: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        let q = b * (-lambda).exp();
        return c * q / (1.0 - q);
    }
    // Terms are eventually log-concave decreasing; stop once they are far
    // below the running sum and still falling.
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for n in 1..1_000_000 {
        let ln_t = tree_term_ln(b, c, lambda, alpha, n);
        let t = ln_t.exp();
        sum += t;
        if ln_t < prev && sum > 0.0 && t < sum * 1e-18 {
            break;
        }
        prev = ln_t;
    }
    sum
}

/// Partial sums of `Σ e^(−Λ d^α) μ` over the shells `k ≤ d < k + 1` of a
/// truncation; never conclusive without a tail bound.
pub fn check_summability_graph(
    graph: &WeightedGraph,
    metric: &PseudoMetric,
    lambda: f64,
    alpha: f64,
) -> Result<SummabilityReport> {
    check_lambda(lambda)?;
    let mut shells: Vec<f64> = Vec::new();
    for x in graph.non_halo() {
        let d = metric.from_root(x);
        if d < 1.0 {
            continue;
        }
        let k = d.floor() as usize;
        if shells.len() <= k {
            shells.resize(k + 1, 0.0);
        }
        shells[k] += (-lambda * d.powf(alpha)).exp() * graph.measure(x);
    }
    let mut acc = 0.0;
    let partial_sums = shells
        .iter()
        .skip(1)
        .map(|s| {
            acc += s;
            acc
        })
        .collect();
    Ok(SummabilityReport {
        verdict: Summability::Inconclusive { partial_sums },
        limit_ratio: None,
    })
}

/// Test functions `ξ`, `η` around the root, with `β = α`, `M = T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunctions {
    pub alpha: f64,
    pub beta: f64,
    pub m: f64,
    pub t_max: f64,
    pub lambda: f64,
    pub s: f64,
    pub c0: f64,
    pub r0: f64,
    pub r: f64,
    pub r1: f64,
    /// Intrinsic defect of the metric the functions were built from.
    pub metric_defect: f64,
}

/// Number of interior time samples used by the pointwise checks.
pub const TIME_SAMPLES: usize = 16;

impl TestFunctions {
    /// `ρ = max(d^β, r^β)`.
    pub fn rho(&self, d: f64) -> f64 {
        if self.beta == 0.0 {
            1.0
        } else {
            d.max(self.r).powf(self.beta)
        }
    }

    pub fn xi(&self, d: f64, t: f64) -> f64 {
        -self.m * self.rho(d) / (self.lambda * self.t_max - t)
    }

    pub fn xi_t(&self, d: f64, t: f64) -> f64 {
        let den = self.lambda * self.t_max - t;
        -self.m * self.rho(d) / (den * den)
    }

    pub fn eta(&self, d: f64) -> f64 {
        (2.0 * (self.r1 - self.s - d).max(0.0) / self.r1).min(1.0)
    }

    /// `T k / 17` for `k = 1..=16`.
    pub fn time_samples(&self) -> Vec<f64> {
        (1..=TIME_SAMPLES)
            .map(|k| self.t_max * k as f64 / (TIME_SAMPLES + 1) as f64)
            .collect()
    }

    /// Whether the annulus indicator `r1/2 − 2s ≤ d ≤ r1` is set.
    pub fn in_annulus(&self, d: f64) -> bool {
        d >= self.r1 / 2.0 - 2.0 * self.s && d <= self.r1
    }
}

/// `β = α`, `M = T = min(1, 2 c0 R0^(2−2β) e^(−2β R0^(β−1) s/(λ−1)) / β²)`
/// (`1` when `β = 0`), `r = 2s + R0`, `r1 = 2r + 8s + 1`.
///
/// A metric that is not intrinsic is accepted; its defect is recorded.
pub fn make_test_functions(metric: &PseudoMetric, alpha: f64, c0: f64, r0: f64, lambda: f64) -> Result<TestFunctions> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return Err(Error::BadLambda(lambda));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    if !(c0 > 0.0 && c0.is_finite()) || !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "c0 and R0 must be positive, got {c0}, {r0}"
        )));
    }
    let beta = alpha;
    let s = metric.jump_size();
    let m = if beta == 0.0 {
        1.0
    } else {
        let bound =
            2.0 * c0 * r0.powf(2.0 - 2.0 * beta) * (-2.0 * beta * r0.powf(beta - 1.0) * s / (lambda - 1.0)).exp()
                / (beta * beta);
        bound.min(1.0)
    };
    let r = 2.0 * s + r0;
    Ok(TestFunctions {
        alpha,
        beta,
        m,
        t_max: m,
        lambda,
        s,
        c0,
        r0,
        r,
        r1: 2.0 * r + 8.0 * s + 1.0,
        metric_defect: metric.intrinsic_defect(),
    })
}

pub const XI_TOLERANCE: f64 = 1e-10;

/// `V ξ_t μ + ½ Σ_y ω (1 − e^(ξ(y,t) − ξ(x,t)))²` at every non-halo vertex
/// and every time sample; the expression must be `≤ 0`.
///
/// Vertices with `V = 0` and a positive second term are flagged.
pub fn check_xi_inequality(
    graph: &WeightedGraph,
    metric: &PseudoMetric,
    potential: &VertexField,
    tf: &TestFunctions,
    t_samples: &[f64],
) -> Result<CheckReport> {
    graph.check_field(potential)?;
    check_times(tf, t_samples)?;
    let mut report = CheckReport::new("xi-inequality", XI_TOLERANCE);
    for x in graph.non_halo() {
        let dx = metric.from_root(x);
        let mut flagged = false;
        for &t in t_samples {
            let xi_x = tf.xi(dx, t);
            let spread: f64 = graph
                .neighbors(x)
                .iter()
                .map(|nb| {
                    let e = 1.0 - (tf.xi(metric.from_root(nb.vertex), t) - xi_x).exp();
                    nb.weight * e * e
                })
                .sum();
            let value = potential[x] * tf.xi_t(dx, t) * graph.measure(x) + 0.5 * spread;
            if potential[x] == 0.0 && spread > 0.0 && !flagged {
                report.flagged.push(x);
                flagged = true;
            }
            report.record(CheckRow { vertex: x, t, value });
        }
    }
    Ok(report)
}

fn check_times(tf: &TestFunctions, t_samples: &[f64]) -> Result<()> {
    if let Some(&t) = t_samples.iter().find(|&&t| !(t >= 0.0 && t <= tf.t_max)) {
        return Err(Error::InvalidParameter(format!(
            "time sample {t} outside [0, {}]",
            tf.t_max
        )));
    }
    Ok(())
}

pub const ETA_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaGradientReport {
    /// Max over ordered edges of `|∇_xy η| / ((2/r1) d(x, y) χ(x))`.
    pub edge_ratio: f64,
    /// Max over vertices of `Σ_y (∇_xy η)² ω(x, y) / (4 μ(x) χ(x) / r1²)`.
    pub vertex_ratio: f64,
    pub edges_checked: usize,
    pub vertices_checked: usize,
    pub worst_edge: Option<(usize, usize)>,
    pub worst_vertex: Option<usize>,
}

impl EtaGradientReport {
    pub fn passed(&self) -> bool {
        self.edge_ratio <= 1.0 + ETA_TOLERANCE && self.vertex_ratio <= 1.0 + ETA_TOLERANCE
    }

    pub fn summary_line(&self) -> String {
        summary_line(
            "eta-gradient",
            self.passed(),
            self.edge_ratio.max(self.vertex_ratio) - 1.0,
        )
    }
}

/// A nonzero left side over a vanishing bound counts as an infinite ratio.
fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

/// Gradient bounds of the cut-off `η`, per edge and per vertex, each carrying
/// the annulus indicator `r1/2 − 2s ≤ d(x) ≤ r1`.
pub fn check_eta_gradient(
    graph: &WeightedGraph,
    metric: &PseudoMetric,
    tf: &TestFunctions,
) -> Result<EtaGradientReport> {
    if let Some(x) = (0..graph.len()).find(|&x| graph.is_halo(x) && metric.from_root(x) <= tf.r1) {
        return Err(Error::TruncationTooShallow(format!(
            "halo vertex {x} at distance {} lies within r1 = {}",
            metric.from_root(x),
            tf.r1
        )));
    }
    let mut report = EtaGradientReport {
        edge_ratio: 0.0,
        vertex_ratio: 0.0,
        edges_checked: 0,
        vertices_checked: 0,
        worst_edge: None,
        worst_vertex: None,
    };
    for x in graph.non_halo() {
        let dx = metric.from_root(x);
        let chi = if tf.in_annulus(dx) { 1.0 } else { 0.0 };
        let eta_x = tf.eta(dx);
        let mut energy = 0.0;
        for (i, nb) in graph.neighbors(x).iter().enumerate() {
            let grad = tf.eta(metric.from_root(nb.vertex)) - eta_x;
            let q = ratio(grad.abs(), 2.0 / tf.r1 * metric.edge_distance_at(x, i) * chi);
            report.edges_checked += 1;
            if q > report.edge_ratio {
                report.edge_ratio = q;
                report.worst_edge = Some((x, nb.vertex));
            }
            energy += grad * grad * nb.weight;
        }
        let q = ratio(energy, 4.0 / (tf.r1 * tf.r1) * graph.measure(x) * chi);
        report.vertices_checked += 1;
        if q > report.vertex_ratio {
            report.vertex_ratio = q;
            report.worst_vertex = Some(x);
        }
    }
    Ok(report)
}

pub const SUBSOLUTION_TOLERANCE: f64 = 1e-10;
/// Samples with `|v(x, t)|` at or below this are treated as crossing points.
pub const CROSSING_TOLERANCE: f64 = 1e-9;

fn check_unit_interval(u: &VertexField) -> Result<()> {
    if let Some(x) = (0..u.len()).find(|&x| !(u[x] >= -1e-12 && u[x] <= 1.0 + 1e-12)) {
        return Err(Error::ConditionViolated {
            condition: format!("0 <= u <= 1 (u = {})", u[x]),
            vertex: x,
        });
    }
    Ok(())
}

fn check_solution_on(graph: &WeightedGraph, potential: &VertexField, u: &VertexField, region: &[usize]) -> Result<()> {
    let tol = RESIDUAL_TOLERANCE * (1.0 + u.sup_norm());
    for &x in region {
        graph.check_interior(x)?;
        let residual = laplacian_unchecked(graph, u, x) - potential[x] * u[x];
        if residual.abs() > tol {
            return Err(Error::NotASolution { vertex: x, residual });
        }
    }
    Ok(())
}

/// `V ∂_t v_+ − Δv_+` for `v = e^t u − 1` at every vertex of `region` (all
/// non-halo vertices when `None`) and every time sample, skipping crossing
/// points `|v| ≤ 1e−9`. The expression must be `≤ 0`.
///
/// `u` must take values in `[0, 1]` and solve `ℒu = 0` on the region.
pub fn check_subsolution(
    graph: &WeightedGraph,
    potential: &VertexField,
    u: &VertexField,
    region: Option<&[usize]>,
    t_samples: &[f64],
) -> Result<CheckReport> {
    graph.check_field(potential)?;
    graph.check_field(u)?;
    check_unit_interval(u)?;
    let all: Vec<usize>;
    let region = match region {
        Some(r) => r,
        None => {
            all = graph.non_halo().collect();
            &all
        }
    };
    check_solution_on(graph, potential, u, region)?;
    let mut report = CheckReport::new("vplus-subsolution", SUBSOLUTION_TOLERANCE);
    for &t in t_samples {
        let et = t.exp();
        for &x in region {
            let v = et * u[x] - 1.0;
            if v.abs() <= CROSSING_TOLERANCE {
                report.skipped += 1;
                continue;
            }
            let vp = v.max(0.0);
            let dt = if v > 0.0 { et * u[x] } else { 0.0 };
            let sum: f64 = graph
                .neighbors(x)
                .iter()
                .map(|nb| nb.weight * ((et * u[nb.vertex] - 1.0).max(0.0) - vp))
                .sum();
            let value = potential[x] * dt - sum / graph.measure(x);
            report.record(CheckRow { vertex: x, t, value });
        }
    }
    Ok(report)
}

pub const APRIORI_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_QUADRATURE_NODES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AprioriReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub slack: f64,
    pub nodes: usize,
}

impl AprioriReport {
    pub fn passed(&self) -> bool {
        self.slack >= -APRIORI_TOLERANCE
    }

    pub fn summary_line(&self) -> String {
        summary_line("energy-estimate", self.passed(), -self.slack)
    }
}

/// Both sides of the weighted energy estimate for `v = e^t u − 1`:
///
/// ```text
/// Σ V η² v_+²(T) e^ξ(T) μ − Σ V η² v_+²(0) e^ξ(0) μ
///   ≤ ∫ Σ_x v_+² η² e^ξ { V ξ_t μ + ½ Σ_y ω (1 − e^(ξ(y)−ξ(x)))² } dt
///   + 2 ∫ Σ_{x,y} v_+²(x) e^ξ(y) (η(y) − η(x))² ω dt,
/// ```
///
/// time integrals by the composite trapezoid rule on `nodes` points.
///
/// Checked first: `supp η` avoids the halo, `η` and `e^ξ` are paired
/// monotonically along every edge, `0 ≤ u ≤ 1`, and `ℒu = 0` on `supp η`.
pub fn check_apriori(
    graph: &WeightedGraph,
    metric: &PseudoMetric,
    potential: &VertexField,
    u: &VertexField,
    tf: &TestFunctions,
    nodes: usize,
) -> Result<AprioriReport> {
    graph.check_field(potential)?;
    graph.check_field(u)?;
    if nodes < 2 {
        return Err(Error::InvalidParameter("need at least 2 quadrature nodes".into()));
    }
    let d: Vec<f64> = (0..graph.len()).map(|x| metric.from_root(x)).collect();
    let eta: Vec<f64> = d.iter().map(|&d| tf.eta(d)).collect();
    let support: Vec<usize> = (0..graph.len()).filter(|&x| eta[x] > 0.0).collect();
    if let Some(&x) = support.iter().find(|&&x| graph.is_halo(x)) {
        return Err(Error::ConditionViolated {
            condition: "cut-off support avoids the halo".into(),
            vertex: x,
        });
    }
    let grid: Vec<f64> = (0..nodes).map(|k| tf.t_max * k as f64 / (nodes - 1) as f64).collect();
    for &t in tf.time_samples().iter().chain([0.0, tf.t_max].iter()) {
        for (x, y, _) in graph.edges() {
            let pairing = (eta[y] * eta[y] - eta[x] * eta[x]) * (tf.xi(d[y], t).exp() - tf.xi(d[x], t).exp());
            if pairing < 0.0 {
                return Err(Error::ConditionViolated {
                    condition: "cut-off and weight are monotonically paired".into(),
                    vertex: x,
                });
            }
        }
    }
    check_unit_interval(u)?;
    check_solution_on(graph, potential, u, &support)?;

    let vplus = |x: usize, t: f64| (t.exp() * u[x] - 1.0).max(0.0);
    let boundary = |t: f64| -> f64 {
        support
            .iter()
            .map(|&x| {
                let vp = vplus(x, t);
                potential[x] * eta[x] * eta[x] * vp * vp * tf.xi(d[x], t).exp() * graph.measure(x)
            })
            .sum()
    };
    let lhs = boundary(tf.t_max) - boundary(0.0);

    // Ordered pairs with η(y) ≠ η(x), carrying (η(y) − η(x))² ω(x, y).
    let pairs: Vec<(usize, usize, f64)> = (0..graph.len())
        .flat_map(|x| graph.neighbors(x).iter().map(move |nb| (x, nb.vertex, nb.weight)))
        .filter_map(|(x, y, w)| {
            let de = eta[y] - eta[x];
            (de != 0.0).then_some((x, y, de * de * w))
        })
        .collect();
    let integrand = |t: f64| -> f64 {
        let mut first = 0.0;
        for &x in &support {
            let vp = vplus(x, t);
            if vp == 0.0 {
                continue;
            }
            let xi_x = tf.xi(d[x], t);
            let spread: f64 = graph
                .neighbors(x)
                .iter()
                .map(|nb| {
                    let e = 1.0 - (tf.xi(d[nb.vertex], t) - xi_x).exp();
                    nb.weight * e * e
                })
                .sum();
            let brace = potential[x] * tf.xi_t(d[x], t) * graph.measure(x) + 0.5 * spread;
            first += vp * vp * eta[x] * eta[x] * xi_x.exp() * brace;
        }
        let mut second = 0.0;
        for &(x, y, weight) in &pairs {
            let vp = vplus(x, t);
            if vp != 0.0 {
                second += vp * vp * tf.xi(d[y], t).exp() * weight;
            }
        }
        first + 2.0 * second
    };
    let h = tf.t_max / (nodes - 1) as f64;
    let values: Vec<f64> = grid.iter().map(|&t| integrand(t)).collect();
    let rhs = h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[nodes - 1]));
    Ok(AprioriReport {
        lhs,
        rhs,
        slack: rhs - lhs,
        nodes,
    })
}
