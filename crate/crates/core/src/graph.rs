//! Weighted graphs `(G, ω, μ)` and vertex functions.
//!
//! A [`WeightedGraph`] is a finite, connected, locally finite graph with a
//! symmetric edge weight `ω`, a positive node measure `μ` and a designated
//! root. Infinite graphs are represented by truncations at a hop radius from
//! the root; vertices on the outermost sphere of a truncation form the
//! *halo*, where neighborhoods are incomplete and operators are refused.

use std::collections::VecDeque;
use std::ops::Index;

use crate::error::{Error, Result};

/// One stored adjacency entry `y ~ x` with weight `ω(x, y) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub vertex: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    adjacency: Vec<Vec<Neighbor>>,
    measure: Vec<f64>,
    root: usize,
    hops: Vec<usize>,
    truncation: Option<usize>,
    halo: Vec<bool>,
}

impl WeightedGraph {
    /// Builds a graph from unordered weighted edges.
    ///
    /// Each triple `(x, y, ω)` is stored symmetrically; zero weights mean
    /// "not adjacent" and are dropped. A pair listed twice must carry the
    /// same weight both times.
    pub fn build(edges: &[(usize, usize, f64)], measure: Vec<f64>, root: usize) -> Result<Self> {
        let n = measure.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if root >= n {
            return Err(Error::VertexOutOfRange { vertex: root, n });
        }
        for (vertex, &value) in measure.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonpositiveMeasure { vertex, value });
            }
        }

        let mut adjacency: Vec<Vec<Neighbor>> = vec![Vec::new(); n];
        for &(x, y, weight) in edges {
            for v in [x, y] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if !(weight >= 0.0 && weight.is_finite()) {
                return Err(Error::NegativeWeight { x, y, weight });
            }
            if x == y {
                return Err(Error::SelfLoop { vertex: x });
            }
            if weight == 0.0 {
                continue;
            }
            adjacency[x].push(Neighbor { vertex: y, weight });
            adjacency[y].push(Neighbor { vertex: x, weight });
        }
        for (x, list) in adjacency.iter_mut().enumerate() {
            list.sort_by_key(|nb| nb.vertex);
            let mut deduped: Vec<Neighbor> = Vec::with_capacity(list.len());
            for nb in list.drain(..) {
                match deduped.last() {
                    Some(last) if last.vertex == nb.vertex => {
                        if last.weight != nb.weight {
                            return Err(Error::ConflictingWeight {
                                x,
                                y: nb.vertex,
                                first: last.weight,
                                second: nb.weight,
                            });
                        }
                    }
                    _ => deduped.push(nb),
                }
            }
            *list = deduped;
        }

        let hops = bfs_hops(&adjacency, root);
        if let Some(vertex) = hops.iter().position(|&h| h == usize::MAX) {
            return Err(Error::DisconnectedGraph { vertex, root });
        }
        Ok(Self {
            adjacency,
            measure,
            root,
            hops,
            truncation: None,
            halo: vec![false; n],
        })
    }

    /// Marks this graph as the hop-radius `radius` truncation of an
    /// infinite graph: vertices at hop distance `>= radius` become halo.
    pub fn with_truncation(mut self, radius: usize) -> Self {
        self.truncation = Some(radius);
        self.halo = self.hops.iter().map(|&h| h >= radius).collect();
        self
    }

    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn truncation(&self) -> Option<usize> {
        self.truncation
    }

    pub fn neighbors(&self, x: usize) -> &[Neighbor] {
        &self.adjacency[x]
    }

    /// Edge weight `ω(x, y)`, zero when not adjacent.
    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.adjacency[x]
            .binary_search_by_key(&y, |nb| nb.vertex)
            .map(|i| self.adjacency[x][i].weight)
            .unwrap_or(0.0)
    }

    pub fn measure(&self, x: usize) -> f64 {
        self.measure[x]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    /// `deg(x) = Σ_y ω(x, y)`.
    pub fn degree(&self, x: usize) -> f64 {
        self.adjacency[x].iter().map(|nb| nb.weight).sum()
    }

    /// `Deg(x) = deg(x) / μ(x)`.
    pub fn weighted_degree(&self, x: usize) -> f64 {
        self.degree(x) / self.measure[x]
    }

    /// Number of stored neighbors of `x`.
    pub fn valence(&self, x: usize) -> usize {
        self.adjacency[x].len()
    }

    /// Hop (edge-count) distance from the root.
    pub fn hop(&self, x: usize) -> usize {
        self.hops[x]
    }

    pub fn hops(&self) -> &[usize] {
        &self.hops
    }

    pub fn max_hop(&self) -> usize {
        self.hops.iter().copied().max().unwrap_or(0)
    }

    pub fn is_halo(&self, x: usize) -> bool {
        self.halo[x]
    }

    pub fn non_halo(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&x| !self.halo[x])
    }

    /// Undirected edges `(x, y, ω)` with `x < y`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(x, list)| {
            list.iter()
                .filter(move |nb| nb.vertex > x)
                .map(move |nb| (x, nb.vertex, nb.weight))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub(crate) fn check_field(&self, f: &VertexField) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::FieldLength {
                expected: self.len(),
                got: f.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_interior(&self, x: usize) -> Result<()> {
        if x >= self.len() {
            return Err(Error::VertexOutOfRange {
                vertex: x,
                n: self.len(),
            });
        }
        if self.halo[x] {
            return Err(Error::HaloVertex { vertex: x });
        }
        Ok(())
    }
}

fn bfs_hops(adjacency: &[Vec<Neighbor>], root: usize) -> Vec<usize> {
    let mut hops = vec![usize::MAX; adjacency.len()];
    let mut queue = VecDeque::new();
    hops[root] = 0;
    queue.push_back(root);
    while let Some(x) = queue.pop_front() {
        for nb in &adjacency[x] {
            if hops[nb.vertex] == usize::MAX {
                hops[nb.vertex] = hops[x] + 1;
                queue.push_back(nb.vertex);
            }
        }
    }
    hops
}

/// A real-valued function on the vertices of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexField(Vec<f64>);

impl VertexField {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self(vec![value; n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self((0..n).map(f).collect())
    }

    /// Indicator of a single vertex.
    pub fn indicator(n: usize, x: usize) -> Self {
        let mut v = vec![0.0; n];
        v[x] = 1.0;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Vertices where the value is nonzero.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(x, _)| x)
            .collect()
    }

    /// True when every nonzero value sits on a non-halo vertex of `graph`.
    pub fn supported_away_from_halo(&self, graph: &WeightedGraph) -> bool {
        self.0.iter().enumerate().all(|(x, &v)| v == 0.0 || !graph.is_halo(x))
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }
}

impl Index<usize> for VertexField {
    type Output = f64;

    fn index(&self, x: usize) -> &f64 {
        &self.0[x]
    }
}

impl From<Vec<f64>> for VertexField {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

/// `∇_xy f = f(y) − f(x)`.
#[inline]
pub fn difference(f: &VertexField, x: usize, y: usize) -> f64 {
    f[y] - f[x]
}

/// Laplacian sum without the halo check; exact wherever the stored
/// neighborhood of `x` is complete, or wherever `f` vanishes on `x` and on
/// every missing neighbor.
#[inline]
pub(crate) fn laplacian_unchecked(graph: &WeightedGraph, f: &VertexField, x: usize) -> f64 {
    let fx = f[x];
    let sum: f64 = graph
        .neighbors(x)
        .iter()
        .map(|nb| nb.weight * (f[nb.vertex] - fx))
        .sum();
    sum / graph.measure(x)
}

/// `Δf(x) = (1/μ(x)) Σ_y ω(x, y) (f(y) − f(x))`.
pub fn laplacian(graph: &WeightedGraph, f: &VertexField, x: usize) -> Result<f64> {
    graph.check_field(f)?;
    graph.check_interior(x)?;
    Ok(laplacian_unchecked(graph, f, x))
}

/// `|∇f(x)|² = (1/μ(x)) Σ_y ω(x, y) (f(y) − f(x))²`.
pub fn gradient_squared(graph: &WeightedGraph, f: &VertexField, x: usize) -> Result<f64> {
    graph.check_field(f)?;
    graph.check_interior(x)?;
    let fx = f[x];
    let sum: f64 = graph
        .neighbors(x)
        .iter()
        .map(|nb| nb.weight * (f[nb.vertex] - fx).powi(2))
        .sum();
    Ok(sum / graph.measure(x))
}

/// `ℒu(x) = Δu(x) − V(x) u(x)` at a non-halo vertex.
pub fn schrodinger(graph: &WeightedGraph, potential: &VertexField, u: &VertexField, x: usize) -> Result<f64> {
    Ok(laplacian(graph, u, x)? - potential[x] * u[x])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> WeightedGraph {
        WeightedGraph::build(&[(0, 1, 1.0), (1, 2, 1.0)], vec![1.0; 3], 0).unwrap()
    }

    #[test]
    fn path_degrees() {
        let g = path3();
        assert_eq!(g.degree(0), 1.0);
        assert_eq!(g.degree(1), 2.0);
        assert_eq!(g.degree(2), 1.0);
        assert_eq!(g.weight(1, 0), g.weight(0, 1));
        assert_eq!(g.weight(0, 2), 0.0);
    }

    #[test]
    fn rejects_self_loop() {
        let err = WeightedGraph::build(&[(0, 0, 1.0)], vec![1.0], 0).unwrap_err();
        assert_eq!(err, Error::SelfLoop { vertex: 0 });
    }

    #[test]
    fn rejects_disconnected() {
        let err = WeightedGraph::build(&[(0, 1, 1.0), (2, 3, 1.0)], vec![1.0; 4], 0).unwrap_err();
        assert!(matches!(err, Error::DisconnectedGraph { .. }));
    }

    #[test]
    fn rejects_bad_weight_and_measure() {
        assert!(matches!(
            WeightedGraph::build(&[(0, 1, -1.0)], vec![1.0; 2], 0),
            Err(Error::NegativeWeight { .. })
        ));
        assert!(matches!(
            WeightedGraph::build(&[(0, 1, 1.0)], vec![1.0, 0.0], 0),
            Err(Error::NonpositiveMeasure { vertex: 1, .. })
        ));
        assert!(matches!(
            WeightedGraph::build(&[(0, 1, 1.0), (1, 0, 2.0)], vec![1.0; 2], 0),
            Err(Error::ConflictingWeight { .. })
        ));
    }

    #[test]
    fn gradient_squared_on_path() {
        let g = path3();
        let f = VertexField::new(vec![0.0, 1.0, 3.0]);
        assert_eq!(gradient_squared(&g, &f, 1).unwrap(), 5.0);
    }

    #[test]
    fn halo_is_refused() {
        let g = path3().with_truncation(2);
        let f = VertexField::constant(3, 1.0);
        assert_eq!(laplacian(&g, &f, 1).unwrap(), 0.0);
        assert_eq!(laplacian(&g, &f, 2), Err(Error::HaloVertex { vertex: 2 }));
    }
}
