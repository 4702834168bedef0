//! Homogeneous model trees `(T_b, ω0, μ_c)` and radial potential families.

use crate::error::{Error, Result};
use crate::graph::{VertexField, WeightedGraph};
use crate::metric::PseudoMetric;

pub const DEFAULT_MAX_VERTICES: usize = 10_000_000;

/// Homogeneous model tree truncated at hop depth `depth`.
///
/// Vertices are numbered breadth-first from the root, so sphere `S_r`
/// occupies a contiguous id range and vertex `i` has children
/// `b·i + 1 ..= b·i + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelTreeSpec {
    pub branching: usize,
    pub depth: usize,
    pub measure: f64,
    pub max_vertices: usize,
}

impl ModelTreeSpec {
    pub fn new(branching: usize, depth: usize, measure: f64) -> Self {
        Self {
            branching,
            depth,
            measure,
            max_vertices: DEFAULT_MAX_VERTICES,
        }
    }

    pub fn with_max_vertices(mut self, limit: usize) -> Self {
        self.max_vertices = limit;
        self
    }

    /// `1 + b + … + b^R`, saturating.
    pub fn vertex_count(&self) -> u128 {
        let b = self.branching as u128;
        let mut total: u128 = 0;
        let mut sphere: u128 = 1;
        for _ in 0..=self.depth {
            total = total.saturating_add(sphere);
            sphere = sphere.saturating_mul(b);
        }
        total
    }

    /// First vertex id on sphere `S_r`.
    pub fn sphere_start(&self, r: usize) -> usize {
        let b = self.branching;
        if b == 1 {
            r
        } else {
            (b.pow(r as u32) - 1) / (b - 1)
        }
    }

    /// Id range of sphere `S_r`.
    pub fn sphere(&self, r: usize) -> std::ops::Range<usize> {
        self.sphere_start(r)..self.sphere_start(r + 1)
    }
}

pub fn build_model_tree(spec: &ModelTreeSpec) -> Result<WeightedGraph> {
    if spec.branching < 1 {
        return Err(Error::InvalidParameter("branching must be >= 1".into()));
    }
    if spec.depth < 1 {
        return Err(Error::InvalidParameter("depth must be >= 1".into()));
    }
    if !(spec.measure > 0.0 && spec.measure.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "measure constant must be positive, got {}",
            spec.measure
        )));
    }
    let count = spec.vertex_count();
    if count > spec.max_vertices as u128 {
        return Err(Error::SizeOverflow {
            count,
            limit: spec.max_vertices,
        });
    }
    let n = count as usize;
    let b = spec.branching;
    let edges: Vec<(usize, usize, f64)> = (1..n).map(|child| ((child - 1) / b, child, 1.0)).collect();
    Ok(WeightedGraph::build(&edges, vec![spec.measure; n], 0)?.with_truncation(spec.depth))
}

/// Closed-form radial potentials in terms of `d = d(x, x0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialSpec {
    /// `V = scale · (1 + d)^(−α)`.
    ShiftedPower { alpha: f64, scale: f64 },
    /// `V = scale · max(d, floor)^(−α)`.
    FlooredPower { alpha: f64, scale: f64, floor: f64 },
    /// `V ≡ value`.
    Constant { value: f64 },
}

impl PotentialSpec {
    pub fn shifted(alpha: f64) -> Self {
        PotentialSpec::ShiftedPower { alpha, scale: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            PotentialSpec::ShiftedPower { alpha, scale } => {
                if !(alpha >= 0.0) {
                    return bad(format!("alpha must be >= 0, got {alpha}"));
                }
                if !(scale > 0.0) {
                    return bad(format!("scale must be > 0, got {scale}"));
                }
            }
            PotentialSpec::FlooredPower { alpha, scale, floor } => {
                if !(alpha >= 0.0) {
                    return bad(format!("alpha must be >= 0, got {alpha}"));
                }
                if !(scale > 0.0) || !(floor > 0.0) {
                    return bad(format!("scale and floor must be > 0, got {scale}, {floor}"));
                }
            }
            PotentialSpec::Constant { value } => {
                if !(value > 0.0) {
                    return bad(format!("constant must be > 0, got {value}"));
                }
            }
        }
        Ok(())
    }

    /// Value at distance `d` from the root.
    pub fn eval(&self, d: f64) -> f64 {
        match *self {
            PotentialSpec::ShiftedPower { alpha, scale } => scale * (1.0 + d).powf(-alpha),
            PotentialSpec::FlooredPower { alpha, scale, floor } => scale * d.max(floor).powf(-alpha),
            PotentialSpec::Constant { value } => value,
        }
    }
}

pub fn make_potential(graph: &WeightedGraph, metric: &PseudoMetric, spec: &PotentialSpec) -> Result<VertexField> {
    spec.validate()?;
    Ok(VertexField::from_fn(graph.len(), |x| spec.eval(metric.from_root(x))))
}
