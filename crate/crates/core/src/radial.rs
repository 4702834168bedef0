//! Radial reduction of the Dirichlet problem on homogeneous model trees.
//!
//! With `μ ≡ c`, `ω ≡ 1` and radial data, the solution on `B_R(x0)` only
//! depends on the hop level `n`, and `ℒu = 0` collapses to
//!
//! ```text
//! b (w(1) − w(0)) − c V(0) w(0) = 0
//! b w(n+1) − (b + 1 + c V(n)) w(n) + w(n−1) = 0,   1 ≤ n ≤ R−1
//! w(R) = γ
//! ```
//!
//! solved here by the Thomas algorithm. Used as a reference for the general
//! sparse solver.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::generators::{ModelTreeSpec, PotentialSpec};
use crate::graph::{VertexField, WeightedGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub branching: usize,
    pub measure: f64,
    pub radius: usize,
    pub gamma: f64,
    /// `V(n)` for `n = 0..=R`.
    pub potential: Vec<f64>,
    /// `w(n)` for `n = 0..=R`, with `w(R) = γ`.
    pub values: Vec<f64>,
}

impl RadialProfile {
    /// Largest residual of the recurrence, each relation divided by the sum
    /// of its absolute terms.
    pub fn max_relation_residual(&self) -> f64 {
        let b = self.branching as f64;
        let c = self.measure;
        let w = &self.values;
        let v = &self.potential;
        let mut worst = 0.0f64;
        for n in 0..self.radius {
            let (res, scale) = if n == 0 {
                let terms = [b * w[1], -(b + c * v[0]) * w[0]];
                (terms.iter().sum::<f64>(), terms.iter().map(|t| t.abs()).sum::<f64>())
            } else {
                let terms = [b * w[n + 1], -(b + 1.0 + c * v[n]) * w[n], w[n - 1]];
                (terms.iter().sum::<f64>(), terms.iter().map(|t| t.abs()).sum::<f64>())
            };
            if scale > 0.0 {
                worst = worst.max(res.abs() / scale);
            }
        }
        worst
    }

    /// CSV with columns `n,V_n,w_n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,V_n,w_n\n");
        for n in 0..=self.radius {
            let _ = writeln!(out, "{n},{:.16e},{:.16e}", self.potential[n], self.values[n]);
        }
        out
    }
}

/// `V(n)` for `n = 0..=radius` from a closed-form potential in the hop
/// distance.
pub fn radial_potential(spec: &PotentialSpec, radius: usize) -> Vec<f64> {
    (0..=radius).map(|n| spec.eval(n as f64)).collect()
}

/// Solves the recurrence on levels `0..R` with `w(R) = γ`; `potential` must
/// hold `V(0..=R)`.
pub fn radial_dirichlet(
    branching: usize,
    measure: f64,
    potential: &[f64],
    radius: usize,
    gamma: f64,
) -> Result<RadialProfile> {
    if branching < 1 {
        return Err(Error::InvalidParameter("branching must be >= 1".into()));
    }
    if radius < 1 {
        return Err(Error::InvalidParameter("radius must be >= 1".into()));
    }
    if !(measure > 0.0 && measure.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "measure must be positive, got {measure}"
        )));
    }
    if potential.len() <= radius {
        return Err(Error::InvalidParameter(format!(
            "need {} potential values, got {}",
            radius + 1,
            potential.len()
        )));
    }
    if let Some(n) = potential[..=radius].iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::NegativePotential {
            vertex: n,
            value: potential[n],
        });
    }
    let b = branching as f64;
    let c = measure;

    // Row n: diag(n) w(n) − w(n−1) − b w(n+1) = rhs(n), the recurrence with
    // its sign flipped so that the diagonal is positive.
    let m = radius;
    let mut upper = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    let diag = |n: usize| {
        if n == 0 {
            b + c * potential[0]
        } else {
            b + 1.0 + c * potential[n]
        }
    };
    let lower = |n: usize| if n == 0 { 0.0 } else { -1.0 };
    let rhs_n = |n: usize| if n + 1 == m { b * gamma } else { 0.0 };

    let mut denom = diag(0);
    if !(denom > 0.0) {
        return Err(Error::SingularTridiagonal { row: 0 });
    }
    upper[0] = -b / denom;
    rhs[0] = rhs_n(0) / denom;
    for n in 1..m {
        denom = diag(n) - lower(n) * upper[n - 1];
        if !(denom > 0.0) || !denom.is_finite() {
            return Err(Error::SingularTridiagonal { row: n });
        }
        upper[n] = -b / denom;
        rhs[n] = (rhs_n(n) - lower(n) * rhs[n - 1]) / denom;
    }
    let mut values = vec![gamma; m + 1];
    values[m - 1] = rhs[m - 1];
    for n in (0..m - 1).rev() {
        values[n] = rhs[n] - upper[n] * values[n + 1];
    }
    Ok(RadialProfile {
        branching,
        measure,
        radius,
        gamma,
        potential: potential[..=radius].to_vec(),
        values,
    })
}

/// Field with value `w(hop(x))`, and `γ` beyond the profile radius.
pub fn lift_radial(profile: &RadialProfile, graph: &WeightedGraph) -> Result<VertexField> {
    let depth = graph.truncation().unwrap_or(graph.max_hop());
    if profile.radius > depth {
        return Err(Error::ShapeMismatch(format!(
            "profile radius {} exceeds tree depth {depth}",
            profile.radius
        )));
    }
    let spec = ModelTreeSpec::new(profile.branching, depth, profile.measure);
    if spec.vertex_count() != graph.len() as u128 {
        return Err(Error::ShapeMismatch(format!(
            "graph has {} vertices, model tree b = {} depth {depth} has {}",
            graph.len(),
            profile.branching,
            spec.vertex_count()
        )));
    }
    for r in 0..=depth {
        if let Some(x) = spec.sphere(r).find(|&x| graph.hop(x) != r) {
            return Err(Error::ShapeMismatch(format!("vertex {x} is not on sphere {r}")));
        }
    }
    Ok(VertexField::from_fn(graph.len(), |x| {
        profile.values.get(graph.hop(x)).copied().unwrap_or(profile.gamma)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub max_abs: f64,
    pub vertex: usize,
}

/// Max-abs difference over the non-halo vertices.
pub fn compare(graph: &WeightedGraph, a: &VertexField, b: &VertexField) -> Result<Comparison> {
    if a.len() != graph.len() || b.len() != graph.len() {
        return Err(Error::ShapeMismatch(format!(
            "field lengths {} and {} on a graph with {} vertices",
            a.len(),
            b.len(),
            graph.len()
        )));
    }
    let mut best = Comparison {
        max_abs: 0.0,
        vertex: graph.root(),
    };
    for x in graph.non_halo() {
        let d = (a[x] - b[x]).abs();
        if d > best.max_abs {
            best = Comparison { max_abs: d, vertex: x };
        }
    }
    Ok(best)
}

/// Largest within-sphere spread `max − min` over the non-halo hop spheres.
pub fn sphere_spread(graph: &WeightedGraph, u: &VertexField) -> f64 {
    let levels = graph.max_hop() + 1;
    let mut lo = vec![f64::INFINITY; levels];
    let mut hi = vec![f64::NEG_INFINITY; levels];
    for x in graph.non_halo() {
        let r = graph.hop(x);
        lo[r] = lo[r].min(u[x]);
        hi[r] = hi[r].max(u[x]);
    }
    lo.iter()
        .zip(&hi)
        .filter(|(l, _)| l.is_finite())
        .map(|(l, h)| h - l)
        .fold(0.0, f64::max)
}
