//! The finite Dirichlet problem
//!
//! ```text
//! ℒu = Δu − Vu = f  in Ω,      u = g  outside Ω,
//! ```
//!
//! its linear system, and executable weak and strong maximum principles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{laplacian_unchecked, VertexField, WeightedGraph};
use crate::sparse::{pcg, LdlFactor, SymmetricMatrix};

/// Largest interior handled by the direct solver under [`SolverKind::Auto`].
pub const DIRECT_LIMIT: usize = 20_000;
pub const PCG_TOLERANCE: f64 = 1e-12;
/// Acceptance bound on the plug-in residual, relative to `1 + max|u|`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Auto,
    Direct,
    Iterative,
}

/// `f` is read on `Ω` only and `g` off `Ω` only; both are full-length fields.
#[derive(Debug, Clone)]
pub struct DirichletProblem<'a> {
    graph: &'a WeightedGraph,
    potential: &'a VertexField,
    interior: Vec<usize>,
    f: VertexField,
    g: VertexField,
}

impl<'a> DirichletProblem<'a> {
    pub fn new(
        graph: &'a WeightedGraph,
        potential: &'a VertexField,
        interior: impl IntoIterator<Item = usize>,
        f: VertexField,
        g: VertexField,
    ) -> Result<Self> {
        graph.check_field(potential)?;
        graph.check_field(&f)?;
        graph.check_field(&g)?;
        let mut interior: Vec<usize> = interior.into_iter().collect();
        interior.sort_unstable();
        interior.dedup();
        for &x in &interior {
            if x >= graph.len() {
                return Err(Error::VertexOutOfRange {
                    vertex: x,
                    n: graph.len(),
                });
            }
            if graph.is_halo(x) {
                return Err(Error::HaloContamination { vertex: x });
            }
            let v = potential[x];
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::NegativePotential { vertex: x, value: v });
            }
        }
        if !interior.is_empty() && interior.len() == graph.len() {
            return Err(Error::InteriorCoversGraph);
        }
        Ok(Self {
            graph,
            potential,
            interior,
            f,
            g,
        })
    }

    /// Homogeneous equation `ℒu = 0` in `Ω` with exterior data `g`.
    pub fn homogeneous(
        graph: &'a WeightedGraph,
        potential: &'a VertexField,
        interior: impl IntoIterator<Item = usize>,
        g: VertexField,
    ) -> Result<Self> {
        Self::new(graph, potential, interior, VertexField::zeros(graph.len()), g)
    }

    pub fn graph(&self) -> &WeightedGraph {
        self.graph
    }

    pub fn potential(&self) -> &VertexField {
        self.potential
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn f(&self) -> &VertexField {
        &self.f
    }

    pub fn g(&self) -> &VertexField {
        &self.g
    }
}

/// The system `𝒜u = h` restricted to `Ω`, rows in the order of
/// `vertices`: diagonal `−(Deg(x) + V(x))`, off-diagonal `P(x, y)` for
/// `y ∈ Ω`, right-hand side `f(x) − Σ_{y∉Ω} P(x, y) g(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub vertices: Vec<usize>,
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<f64>,
}

impl LinearSystem {
    pub fn dim(&self) -> usize {
        self.vertices.len()
    }

    /// `|𝒜_xx| − Σ_y |𝒜_xy|` per row; nonnegative for valid problems.
    pub fn dominance_margins(&self) -> Vec<f64> {
        self.diagonal
            .iter()
            .zip(&self.off_diagonal)
            .map(|(d, row)| d.abs() - row.iter().map(|(_, a)| a.abs()).sum::<f64>())
            .collect()
    }
}

pub fn assemble(problem: &DirichletProblem) -> LinearSystem {
    let graph = problem.graph;
    let local = local_index(graph.len(), &problem.interior);
    let n = problem.interior.len();
    let mut diagonal = Vec::with_capacity(n);
    let mut off_diagonal = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for &x in &problem.interior {
        let mu = graph.measure(x);
        diagonal.push(-(graph.weighted_degree(x) + problem.potential[x]));
        let mut row = Vec::new();
        let mut h = problem.f[x];
        for nb in graph.neighbors(x) {
            let p = nb.weight / mu;
            match local[nb.vertex] {
                Some(j) => row.push((j, p)),
                None => h -= p * problem.g[nb.vertex],
            }
        }
        off_diagonal.push(row);
        rhs.push(h);
    }
    LinearSystem {
        vertices: problem.interior.clone(),
        diagonal,
        off_diagonal,
        rhs,
    }
}

fn local_index(n: usize, interior: &[usize]) -> Vec<Option<usize>> {
    let mut local = vec![None; n];
    for (i, &x) in interior.iter().enumerate() {
        local[x] = Some(i);
    }
    local
}

/// Row `x` times `−μ(x)`: `K = diag(deg + μV) − W`, symmetric positive definite.
fn symmetrize(problem: &DirichletProblem, system: &LinearSystem) -> (SymmetricMatrix, Vec<f64>) {
    let mut diag = Vec::with_capacity(system.dim());
    let mut off = Vec::with_capacity(system.dim());
    let mut rhs = Vec::with_capacity(system.dim());
    for (i, &x) in system.vertices.iter().enumerate() {
        let mu = problem.graph.measure(x);
        diag.push(problem.graph.degree(x) + mu * problem.potential[x]);
        off.push(
            problem
                .graph
                .neighbors(x)
                .iter()
                .filter_map(|nb| {
                    let j = system.vertices.binary_search(&nb.vertex).ok()?;
                    Some((j, -nb.weight))
                })
                .collect(),
        );
        // `0.0 −` keeps zero data at `+0`.
        rhs.push(0.0 - mu * system.rhs[i]);
    }
    (SymmetricMatrix { diag, off }, rhs)
}

pub fn solve(problem: &DirichletProblem) -> Result<VertexField> {
    solve_with(problem, SolverKind::Auto)
}

pub fn solve_with(problem: &DirichletProblem, kind: SolverKind) -> Result<VertexField> {
    let mut u = problem.g.clone();
    if problem.interior.is_empty() {
        return Ok(u);
    }
    let system = assemble(problem);
    let (k, b) = symmetrize(problem, &system);
    let n = system.dim();
    let direct = match kind {
        SolverKind::Auto => n <= DIRECT_LIMIT,
        SolverKind::Direct => true,
        SolverKind::Iterative => false,
    };
    let cap = (50.0 * (n as f64).sqrt()).ceil() as usize;
    let mut x = if direct {
        let factor = LdlFactor::factor(&k)?;
        let mut x = factor.solve(&b);
        // One step of iterative refinement.
        let mut kx = vec![0.0; n];
        k.apply(&x, &mut kx);
        let r: Vec<f64> = b.iter().zip(&kx).map(|(b, a)| b - a).collect();
        for (xi, dx) in x.iter_mut().zip(factor.solve(&r)) {
            *xi += dx;
        }
        x
    } else {
        pcg(&k, &b, PCG_TOLERANCE, cap)?
    };
    for (&v, xi) in system.vertices.iter().zip(x.iter_mut()) {
        u.values_mut()[v] = std::mem::take(xi);
    }
    let res = residual(problem, &u);
    if res >= RESIDUAL_TOLERANCE * (1.0 + u.sup_norm()) {
        return Err(Error::NonConvergence {
            iterations: if direct { 1 } else { cap },
            residual: res,
        });
    }
    Ok(u)
}

/// `max_{x∈Ω} |Δu(x) − V(x)u(x) − f(x)|`.
pub fn residual(problem: &DirichletProblem, u: &VertexField) -> f64 {
    problem
        .interior
        .iter()
        .map(|&x| {
            let lu = laplacian_unchecked(problem.graph, u, x) - problem.potential[x] * u[x];
            (lu - problem.f[x]).abs()
        })
        .fold(0.0, f64::max)
}

/// Interior ball radius (in hops from the root) and data of one weak
/// maximum principle trial.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakMaxTrial {
    pub radius: usize,
    pub f: VertexField,
    pub g: VertexField,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakMaxViolation {
    pub trial: usize,
    pub vertex: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakMaxReport {
    pub trials: usize,
    /// Trials rejected because `f > 0` or `g < 0` somewhere.
    pub skipped: Vec<usize>,
    pub violations: Vec<WeakMaxViolation>,
    /// Smallest interior value seen over all valid trials.
    pub min_value: f64,
}

impl WeakMaxReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const WEAK_MAX_TOLERANCE: f64 = 1e-12;

/// Hop radius bound `R_max` for the trial balls.
fn trial_depth(graph: &WeightedGraph) -> Result<usize> {
    let r_max = graph.truncation().unwrap_or(graph.max_hop() + 1);
    if r_max < 3 {
        return Err(Error::TruncationTooShallow(format!(
            "weak maximum trials need depth >= 3, got {r_max}"
        )));
    }
    Ok(r_max)
}

/// Random trials: radius uniform in `[1, R_max − 2]`, `f` uniform in
/// `[−1, 0]` on the ball, `g` uniform in `[0, 1]` off it.
pub fn random_weak_max_trials(graph: &WeightedGraph, count: usize, seed: u64) -> Result<Vec<WeakMaxTrial>> {
    let r_max = trial_depth(graph)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = graph.len();
    Ok((0..count)
        .map(|_| {
            let radius = rng.gen_range(1..=r_max - 2);
            let mut f = vec![0.0; n];
            let mut g = vec![0.0; n];
            for x in 0..n {
                if graph.hop(x) < radius {
                    f[x] = -rng.gen::<f64>();
                } else {
                    g[x] = rng.gen::<f64>();
                }
            }
            WeakMaxTrial {
                radius,
                f: f.into(),
                g: g.into(),
            }
        })
        .collect())
}

pub fn verify_weak_max_principle(
    graph: &WeightedGraph,
    potential: &VertexField,
    trials: usize,
    seed: u64,
) -> Result<WeakMaxReport> {
    let trials = random_weak_max_trials(graph, trials, seed)?;
    verify_weak_max_trials(graph, potential, &trials)
}

pub fn verify_weak_max_trials(
    graph: &WeightedGraph,
    potential: &VertexField,
    trials: &[WeakMaxTrial],
) -> Result<WeakMaxReport> {
    if let Some(vertex) = (0..graph.len()).find(|&x| !(potential[x] >= 0.0)) {
        return Err(Error::NegativePotential {
            vertex,
            value: potential[vertex],
        });
    }
    let mut report = WeakMaxReport {
        trials: trials.len(),
        skipped: Vec::new(),
        violations: Vec::new(),
        min_value: f64::INFINITY,
    };
    for (t, trial) in trials.iter().enumerate() {
        let interior: Vec<usize> = (0..graph.len()).filter(|&x| graph.hop(x) < trial.radius).collect();
        let inside = local_index(graph.len(), &interior);
        let valid = (0..graph.len()).all(|x| match inside[x] {
            Some(_) => trial.f[x] <= 0.0,
            None => trial.g[x] >= 0.0,
        });
        if !valid {
            report.skipped.push(t);
            continue;
        }
        let problem = DirichletProblem::new(graph, potential, interior, trial.f.clone(), trial.g.clone())?;
        let u = solve(&problem)?;
        for &x in problem.interior() {
            report.min_value = report.min_value.min(u[x]);
            if u[x] < -WEAK_MAX_TOLERANCE {
                report.violations.push(WeakMaxViolation {
                    trial: t,
                    vertex: x,
                    value: u[x],
                });
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrongMaxVerdict {
    IdenticallyZero,
    StrictlyPositive,
    /// An interior zero next to positive values elsewhere.
    Violation {
        zero_vertex: usize,
        positive_vertex: usize,
    },
}

/// Values at or below this count as zeros.
pub const ZERO_TOLERANCE: f64 = 1e-14;

/// Dichotomy for a nonnegative supersolution `ℒu ≤ 0`, evaluated on the
/// non-halo vertices.
pub fn verify_strong_max_principle(
    graph: &WeightedGraph,
    potential: &VertexField,
    u: &VertexField,
) -> Result<StrongMaxVerdict> {
    graph.check_field(potential)?;
    graph.check_field(u)?;
    let tol = RESIDUAL_TOLERANCE * (1.0 + u.sup_norm());
    for x in graph.non_halo() {
        if u[x] < -tol {
            return Err(Error::NotASupersolution {
                vertex: x,
                reason: format!("u = {:e} < 0", u[x]),
            });
        }
        let lu = laplacian_unchecked(graph, u, x) - potential[x] * u[x];
        if lu > tol {
            return Err(Error::NotASupersolution {
                vertex: x,
                reason: format!("ℒu = {lu:e} > 0"),
            });
        }
    }
    let zero = graph.non_halo().find(|&x| u[x] <= ZERO_TOLERANCE);
    let positive = graph.non_halo().find(|&x| u[x] > ZERO_TOLERANCE);
    Ok(match (zero, positive) {
        (None, _) => StrongMaxVerdict::StrictlyPositive,
        (Some(_), None) => StrongMaxVerdict::IdenticallyZero,
        (Some(zero_vertex), Some(positive_vertex)) => StrongMaxVerdict::Violation {
            zero_vertex,
            positive_vertex,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{build_model_tree, make_potential, ModelTreeSpec, PotentialSpec};
    use crate::metric::hop_metric;

    fn path3() -> WeightedGraph {
        WeightedGraph::build(&[(0, 1, 1.0), (1, 2, 1.0)], vec![1.0; 3], 0).unwrap()
    }

    #[test]
    fn path_system_by_hand() {
        let g = path3();
        let v = VertexField::zeros(3);
        let p = DirichletProblem::homogeneous(&g, &v, [1], vec![0.0, 0.0, 2.0].into()).unwrap();
        let sys = assemble(&p);
        assert_eq!(sys.diagonal, vec![-2.0]);
        assert_eq!(sys.rhs, vec![-2.0]);
        assert!(sys.off_diagonal[0].is_empty());
        let u = solve(&p).unwrap();
        assert_eq!(u.values(), &[0.0, 1.0, 2.0]);

        let v3 = VertexField::new(vec![0.0, 3.0, 0.0]);
        let p = DirichletProblem::homogeneous(&g, &v3, [1], vec![0.0, 0.0, 2.0].into()).unwrap();
        assert_eq!(assemble(&p).diagonal, vec![-5.0]);
    }

    #[test]
    fn empty_interior_returns_g() {
        let g = path3();
        let v = VertexField::zeros(3);
        let data = VertexField::new(vec![3.0, -1.0, 0.5]);
        let p = DirichletProblem::homogeneous(&g, &v, [], data.clone()).unwrap();
        assert_eq!(solve(&p).unwrap(), data);
    }

    #[test]
    fn rejects_bad_interiors() {
        let tree = build_model_tree(&ModelTreeSpec::new(2, 2, 1.0)).unwrap();
        let v = VertexField::zeros(tree.len());
        let g = VertexField::zeros(tree.len());
        assert_eq!(
            DirichletProblem::homogeneous(&tree, &v, [0, 3], g.clone()).unwrap_err(),
            Error::HaloContamination { vertex: 3 }
        );
        // The halo sphere carries the exterior data.
        assert!(DirichletProblem::homogeneous(&tree, &v, [0, 1, 2], g.clone()).is_ok());
        let path = WeightedGraph::build(&[(0, 1, 1.0)], vec![1.0; 2], 0).unwrap();
        assert_eq!(
            DirichletProblem::homogeneous(&path, &VertexField::zeros(2), [0, 1], VertexField::zeros(2)).unwrap_err(),
            Error::InteriorCoversGraph
        );
        let neg = VertexField::constant(tree.len(), -1.0);
        assert!(matches!(
            DirichletProblem::homogeneous(&tree, &neg, [0], g),
            Err(Error::NegativePotential { vertex: 0, .. })
        ));
    }

    #[test]
    fn constants_are_harmonic() {
        let tree = build_model_tree(&ModelTreeSpec::new(3, 5, 2.0)).unwrap();
        let v = VertexField::zeros(tree.len());
        let interior: Vec<usize> = (0..tree.len()).filter(|&x| tree.hop(x) < 4).collect();
        let p = DirichletProblem::homogeneous(&tree, &v, interior, VertexField::constant(tree.len(), 2.5)).unwrap();
        let u = solve(&p).unwrap();
        assert!(u.values().iter().all(|&x| (x - 2.5).abs() < 1e-13));
    }

    #[test]
    fn direct_and_iterative_agree() {
        let tree = build_model_tree(&ModelTreeSpec::new(2, 8, 1.0)).unwrap();
        let m = hop_metric(&tree);
        let v = make_potential(&tree, &m, &PotentialSpec::shifted(1.0)).unwrap();
        let interior: Vec<usize> = tree.non_halo().collect::<Vec<_>>()[..200].to_vec();
        let g = VertexField::from_fn(tree.len(), |x| (x % 7) as f64 / 7.0);
        let f = VertexField::from_fn(tree.len(), |x| -((x % 3) as f64));
        let p = DirichletProblem::new(&tree, &v, interior, f, g).unwrap();
        let a = solve_with(&p, SolverKind::Direct).unwrap();
        let b = solve_with(&p, SolverKind::Iterative).unwrap();
        let diff = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-10, "diff {diff}");
    }

    #[test]
    fn weak_max_small_run_and_invalid_trial() {
        let tree = build_model_tree(&ModelTreeSpec::new(2, 6, 1.0)).unwrap();
        let m = hop_metric(&tree);
        let v = make_potential(&tree, &m, &PotentialSpec::shifted(1.0)).unwrap();
        let mut trials = random_weak_max_trials(&tree, 20, 7).unwrap();
        trials.push(WeakMaxTrial {
            radius: 2,
            f: VertexField::indicator(tree.len(), 0),
            g: VertexField::zeros(tree.len()),
        });
        let report = verify_weak_max_trials(&tree, &v, &trials).unwrap();
        assert!(report.passed());
        assert_eq!(report.skipped, vec![20]);
    }

    #[test]
    fn strong_max_verdicts() {
        let tree = build_model_tree(&ModelTreeSpec::new(2, 5, 1.0)).unwrap();
        let n = tree.len();
        let zero_v = VertexField::zeros(n);
        assert_eq!(
            verify_strong_max_principle(&tree, &zero_v, &VertexField::zeros(n)).unwrap(),
            StrongMaxVerdict::IdenticallyZero
        );
        assert_eq!(
            verify_strong_max_principle(&tree, &zero_v, &VertexField::constant(n, 1.0)).unwrap(),
            StrongMaxVerdict::StrictlyPositive
        );
        // A zero at the root surrounded by ones has Δu(x0) > 0.
        let bump = VertexField::from_fn(n, |x| if x == 0 { 0.0 } else { 1.0 });
        assert!(matches!(
            verify_strong_max_principle(&tree, &zero_v, &bump),
            Err(Error::NotASupersolution { vertex: 0, .. })
        ));
    }
}
