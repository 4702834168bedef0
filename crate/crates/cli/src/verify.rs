//! Verification suites, one summary line each.

use liouville_core::calculus::{calculus_identities, calculus_identities_with};
use liouville_core::dirichlet::{
    solve, verify_strong_max_principle, verify_weak_max_principle, DirichletProblem, StrongMaxVerdict,
};
use liouville_core::exhaustion::{check_barrier, dirichlet_exhaustion, make_barrier};
use liouville_core::generators::{build_model_tree, make_potential, ModelTreeSpec, PotentialSpec};
use liouville_core::liouville::{
    check_apriori, check_eta_gradient, check_potential_bound, check_subsolution, check_xi_inequality,
    make_test_functions, summary_line, DEFAULT_QUADRATURE_NODES,
};
use liouville_core::metric::{ball, hop_metric, intrinsic_metric};
use liouville_core::radial::{compare, lift_radial, radial_dirichlet, radial_potential, sphere_spread};
use liouville_core::{VertexField, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::CliError;

pub const CALCULUS_PAIRS: usize = 100;
pub const WEAK_MAX_TRIALS: usize = 1000;
pub const ORACLE_TOLERANCE: f64 = 1e-10;

/// Deliberate defects for checking that the suites can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    NegateLaplacian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst defect observed; its meaning depends on the suite.
    pub max_slack: f64,
}

impl SuiteResult {
    pub fn line(&self) -> String {
        summary_line(self.name, self.passed, self.max_slack)
    }
}

fn negated_laplacian(graph: &WeightedGraph, f: &VertexField, x: usize) -> f64 {
    let sum: f64 = graph
        .neighbors(x)
        .iter()
        .map(|nb| nb.weight * (f[nb.vertex] - f[x]))
        .sum();
    -sum / graph.measure(x)
}

/// Random pair supported on the interior of `T_2` of depth 8.
fn random_pair(graph: &WeightedGraph, rng: &mut ChaCha8Rng) -> (VertexField, VertexField) {
    let inner = graph.truncation().unwrap_or(graph.max_hop()).saturating_sub(1);
    let field = |rng: &mut ChaCha8Rng| {
        let density: f64 = rng.gen_range(0.05..1.0);
        VertexField::from_fn(graph.len(), |x| {
            if graph.hop(x) < inner && rng.gen_bool(density) {
                rng.gen_range(-1.0..1.0)
            } else {
                0.0
            }
        })
    };
    let f = field(rng);
    let g = field(rng);
    (f, g)
}

pub fn calculus_suite(seed: u64, fault: Option<Fault>) -> Result<SuiteResult, CliError> {
    let tree = build_model_tree(&ModelTreeSpec::new(2, 8, 1.0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..CALCULUS_PAIRS {
        let (f, g) = random_pair(&tree, &mut rng);
        let report = match fault {
            Some(Fault::NegateLaplacian) => calculus_identities_with(&tree, &f, &g, negated_laplacian)?,
            None => calculus_identities(&tree, &f, &g)?,
        };
        worst = worst.max(report.residual_ibp).max(report.residual_product);
    }
    Ok(SuiteResult {
        name: "calculus-identities",
        passed: worst < 1e-12,
        max_slack: worst,
    })
}

pub fn weak_max_suite(seed: u64) -> Result<SuiteResult, CliError> {
    let tree = build_model_tree(&ModelTreeSpec::new(2, 8, 1.0))?;
    let metric = hop_metric(&tree);
    let v = make_potential(&tree, &metric, &PotentialSpec::shifted(1.0))?;
    let report = verify_weak_max_principle(&tree, &v, WEAK_MAX_TRIALS, seed)?;
    Ok(SuiteResult {
        name: "weak-max",
        passed: report.passed(),
        max_slack: (-report.min_value).max(0.0),
    })
}

pub fn strong_max_suite(config: &ExperimentConfig) -> Result<SuiteResult, CliError> {
    let tree = build_model_tree(&ModelTreeSpec::new(2, 10, 1.0))?;
    let metric = hop_metric(&tree);
    let mut passed = true;
    for &alpha in &config.alpha_grid {
        let v = make_potential(&tree, &metric, &PotentialSpec::shifted(alpha))?;
        for gamma in [0.0, 1.0] {
            let trace = dirichlet_exhaustion(&tree, &metric, &v, gamma, &[2, 4, 6, 8])?;
            for step in &trace.steps {
                let verdict = verify_strong_max_principle(&tree, &v, &step.u)?;
                passed &= !matches!(verdict, StrongMaxVerdict::Violation { .. });
            }
        }
    }
    Ok(SuiteResult {
        name: "strong-max",
        passed,
        max_slack: if passed { 0.0 } else { 1.0 },
    })
}

/// General solver against the recurrence on `b ∈ {2, 3}`, `R ∈ {6, 12}`.
pub fn oracle_suite(config: &ExperimentConfig) -> Result<SuiteResult, CliError> {
    let mut worst = 0.0f64;
    for b in [2usize, 3] {
        for depth in [6usize, 12] {
            let tree = build_model_tree(&ModelTreeSpec::new(b, depth, 1.0))?;
            let metric = hop_metric(&tree);
            let omega = ball(&tree, &metric, 0, depth as f64)?;
            for &alpha in &config.alpha_grid {
                let spec = PotentialSpec::shifted(alpha);
                let v = make_potential(&tree, &metric, &spec)?;
                let exterior = VertexField::constant(tree.len(), 1.0);
                let u = solve(&DirichletProblem::homogeneous(
                    &tree,
                    &v,
                    omega.iter().copied(),
                    exterior,
                )?)?;
                let profile = radial_dirichlet(b, 1.0, &radial_potential(&spec, depth), depth, 1.0)?;
                let diff = compare(&tree, &u, &lift_radial(&profile, &tree)?)?;
                worst = worst.max(diff.max_abs).max(sphere_spread(&tree, &u));
            }
        }
    }
    Ok(SuiteResult {
        name: "radial-oracle",
        passed: worst < ORACLE_TOLERANCE,
        max_slack: worst,
    })
}

/// `(1/V) Δh + 1` over the oracle grid for `α > 1`.
pub fn barrier_suite(config: &ExperimentConfig) -> Result<SuiteResult, CliError> {
    let mut worst = f64::NEG_INFINITY;
    let mut passed = true;
    for b in [2usize, 3] {
        for depth in [6usize, 12] {
            let tree = build_model_tree(&ModelTreeSpec::new(b, depth, 1.0))?;
            let metric = hop_metric(&tree);
            for &alpha in config.alpha_grid.iter().filter(|&&a| a > 1.0) {
                let v = make_potential(&tree, &metric, &PotentialSpec::shifted(alpha))?;
                let h = make_barrier(b, alpha, 1.0, 1.0)?;
                let report = check_barrier(&tree, &metric, &v, &h)?;
                passed &= report.passed();
                worst = worst.max(report.max_ratio + 1.0);
            }
        }
    }
    Ok(SuiteResult {
        name: "barrier",
        passed,
        max_slack: worst,
    })
}

/// Test-function and energy checks on `T_2` of depth 16 with `μ ≡ 3`, where
/// the intrinsic metric is the hop metric. `u` is the exhaustion iterate on
/// `B_14` for `V = (1 + d)^(−1)`.
pub fn test_function_suites(config: &ExperimentConfig) -> Result<Vec<SuiteResult>, CliError> {
    let tree = build_model_tree(&ModelTreeSpec::new(2, 16, 3.0))?;
    let metric = intrinsic_metric(&tree);
    let v = make_potential(&tree, &metric, &PotentialSpec::shifted(1.0))?;
    let bound = check_potential_bound(&tree, &metric, &v, 1.0)?;
    let tf = make_test_functions(&metric, 1.0, bound.c0, bound.r0, config.lambda_xi)?;
    let ts = tf.time_samples();
    let radius = (tf.r1 - tf.s).ceil() as usize;
    let u = dirichlet_exhaustion(&tree, &metric, &v, 1.0, &[radius])?
        .last()
        .u
        .clone();
    let region = ball(&tree, &metric, 0, radius as f64)?;

    let xi = check_xi_inequality(&tree, &metric, &v, &tf, &ts)?;
    let eta = check_eta_gradient(&tree, &metric, &tf)?;
    let sub = check_subsolution(&tree, &v, &u, Some(&region), &ts)?;
    let energy = check_apriori(&tree, &metric, &v, &u, &tf, DEFAULT_QUADRATURE_NODES)?;
    Ok(vec![
        SuiteResult {
            name: "xi-inequality",
            passed: xi.passed(),
            max_slack: xi.max_slack,
        },
        SuiteResult {
            name: "eta-gradient",
            passed: eta.passed(),
            max_slack: eta.edge_ratio.max(eta.vertex_ratio) - 1.0,
        },
        SuiteResult {
            name: "vplus-subsolution",
            passed: sub.passed(),
            max_slack: sub.max_slack,
        },
        SuiteResult {
            name: "energy-estimate",
            passed: energy.passed(),
            max_slack: -energy.slack,
        },
    ])
}

/// All suites in order.
pub fn run(config: &ExperimentConfig, fault: Option<Fault>) -> Result<Vec<SuiteResult>, CliError> {
    let mut out = vec![
        calculus_suite(config.seed, fault)?,
        weak_max_suite(config.seed)?,
        strong_max_suite(config)?,
        oracle_suite(config)?,
        barrier_suite(config)?,
    ];
    out.extend(test_function_suites(config)?);
    Ok(out)
}
