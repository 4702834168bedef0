//! Path pseudo metrics `d_σ` induced by an edge-length function `σ`,
//! together with the jump size, the intrinsic defect and metric balls.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, ties by vertex id
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Distances induced by `σ` on a [`WeightedGraph`].
///
/// Root distances are computed eagerly; distances from other sources are
/// computed on first request and cached.
#[derive(Debug)]
pub struct PseudoMetric {
    root: usize,
    sigma: Vec<Vec<f64>>,
    edge_distance: Vec<Vec<f64>>,
    root_distance: Vec<f64>,
    jump: f64,
    defects: Vec<Option<f64>>,
    intrinsic_defect: f64,
    cache: Vec<OnceLock<Vec<f64>>>,
}

impl PseudoMetric {
    pub fn root(&self) -> usize {
        self.root
    }

    /// `σ(x, y)` for the `i`-th stored neighbor of `x`.
    pub fn sigma_at(&self, x: usize, i: usize) -> f64 {
        self.sigma[x][i]
    }

    /// `d(x, y)` for the `i`-th stored neighbor `y` of `x`.
    pub fn edge_distance_at(&self, x: usize, i: usize) -> f64 {
        self.edge_distance[x][i]
    }

    /// `d(x, x0)` with `x0` the graph root.
    pub fn from_root(&self, x: usize) -> f64 {
        self.root_distance[x]
    }

    pub fn root_distances(&self) -> &[f64] {
        &self.root_distance
    }

    /// Jump size `s = max { d(x, y) : x ~ y }`, zero on an edgeless graph.
    pub fn jump_size(&self) -> f64 {
        self.jump
    }

    /// Maximum over non-halo vertices of `(1/μ(x)) Σ_y ω(x, y) d²(x, y)`.
    pub fn intrinsic_defect(&self) -> f64 {
        self.intrinsic_defect
    }

    /// Per-vertex defect; `None` on halo vertices.
    pub fn defect(&self, x: usize) -> Option<f64> {
        self.defects[x]
    }

    pub fn is_intrinsic(&self) -> bool {
        self.intrinsic_defect <= 1.0
    }

    /// Distances from `source` to every vertex (cached).
    pub fn distances_from(&self, graph: &WeightedGraph, source: usize) -> &[f64] {
        if source == self.root {
            return &self.root_distance;
        }
        self.cache[source].get_or_init(|| dijkstra(graph, &self.sigma, source))
    }

    pub fn distance(&self, graph: &WeightedGraph, x: usize, y: usize) -> f64 {
        if y == self.root {
            return self.root_distance[x];
        }
        self.distances_from(graph, x)[y]
    }
}

fn dijkstra(graph: &WeightedGraph, sigma: &[Vec<f64>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry {
        dist: 0.0,
        vertex: source,
    });
    while let Some(HeapEntry { dist: d, vertex: x }) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for (i, nb) in graph.neighbors(x).iter().enumerate() {
            let nd = d + sigma[x][i];
            if nd < dist[nb.vertex] {
                dist[nb.vertex] = nd;
                heap.push(HeapEntry {
                    dist: nd,
                    vertex: nb.vertex,
                });
            }
        }
    }
    dist
}

/// Shortest σ-distances from `x` to its own neighbors, searching only
/// within radius `max_y σ(x, y)`.
fn local_edge_distances(graph: &WeightedGraph, sigma: &[Vec<f64>], x: usize) -> Vec<f64> {
    let cutoff = sigma[x].iter().copied().fold(0.0, f64::max);
    let mut dist: HashMap<usize, f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(x, 0.0);
    heap.push(HeapEntry { dist: 0.0, vertex: x });
    while let Some(HeapEntry { dist: d, vertex: v }) = heap.pop() {
        if d > dist[&v] {
            continue;
        }
        for (i, nb) in graph.neighbors(v).iter().enumerate() {
            let nd = d + sigma[v][i];
            if nd > cutoff {
                continue;
            }
            let entry = dist.entry(nb.vertex).or_insert(f64::INFINITY);
            if nd < *entry {
                *entry = nd;
                heap.push(HeapEntry {
                    dist: nd,
                    vertex: nb.vertex,
                });
            }
        }
    }
    graph
        .neighbors(x)
        .iter()
        .enumerate()
        .map(|(i, nb)| dist.get(&nb.vertex).copied().unwrap_or(sigma[x][i]))
        .collect()
}

/// Builds the path pseudo metric for edge lengths `sigma(x, y)`.
///
/// `sigma` is evaluated on stored edges only and must be positive, finite
/// and symmetric there.
pub fn path_metric(graph: &WeightedGraph, sigma: impl Fn(usize, usize) -> f64) -> Result<PseudoMetric> {
    let mut lengths: Vec<Vec<f64>> = Vec::with_capacity(graph.len());
    for x in 0..graph.len() {
        let mut row = Vec::with_capacity(graph.valence(x));
        for nb in graph.neighbors(x) {
            let value = sigma(x, nb.vertex);
            let back = sigma(nb.vertex, x);
            if !(value > 0.0 && value.is_finite()) || value != back {
                return Err(Error::InvalidSigma { x, y: nb.vertex, value });
            }
            row.push(value);
        }
        lengths.push(row);
    }
    Ok(assemble(graph, lengths))
}

/// Builds the path pseudo metric from an explicit list of `(x, y, σ)`
/// entries. Every edge must be listed; entries on non-edges are rejected.
pub fn path_metric_from_lengths(graph: &WeightedGraph, entries: &[(usize, usize, f64)]) -> Result<PseudoMetric> {
    let mut table: HashMap<(usize, usize), f64> = HashMap::with_capacity(entries.len());
    for &(x, y, value) in entries {
        if x >= graph.len() || y >= graph.len() || graph.weight(x, y) == 0.0 {
            if value != 0.0 {
                return Err(Error::InvalidSigma { x, y, value });
            }
            continue;
        }
        let key = (x.min(y), x.max(y));
        if let Some(&prev) = table.get(&key) {
            if prev != value {
                return Err(Error::InvalidSigma { x, y, value });
            }
        }
        table.insert(key, value);
    }
    path_metric(graph, |x, y| table.get(&(x.min(y), x.max(y))).copied().unwrap_or(0.0))
}

/// The hop metric `σ ≡ 1` (edge count along shortest paths).
pub fn hop_metric(graph: &WeightedGraph) -> PseudoMetric {
    let lengths = (0..graph.len()).map(|x| vec![1.0; graph.valence(x)]).collect();
    assemble(graph, lengths)
}

/// `σ(x, y) = min(Deg(x)^(-1/2), Deg(y)^(-1/2))`, which makes the path
/// metric intrinsic: `(1/μ(x)) Σ_y ω(x, y) σ²(x, y) ≤ Σ_y ω(x, y) / deg(x) = 1`.
pub fn intrinsic_metric(graph: &WeightedGraph) -> PseudoMetric {
    let inv_sqrt: Vec<f64> = (0..graph.len()).map(|x| graph.weighted_degree(x).powf(-0.5)).collect();
    let lengths = (0..graph.len())
        .map(|x| {
            graph
                .neighbors(x)
                .iter()
                .map(|nb| inv_sqrt[x].min(inv_sqrt[nb.vertex]))
                .collect()
        })
        .collect();
    assemble(graph, lengths)
}

fn assemble(graph: &WeightedGraph, sigma: Vec<Vec<f64>>) -> PseudoMetric {
    let root = graph.root();
    let root_distance = dijkstra(graph, &sigma, root);
    let edge_distance: Vec<Vec<f64>> = (0..graph.len())
        .map(|x| local_edge_distances(graph, &sigma, x))
        .collect();
    let jump = edge_distance
        .iter()
        .flat_map(|row| row.iter().copied())
        .fold(0.0, f64::max);
    let defects: Vec<Option<f64>> = (0..graph.len())
        .map(|x| {
            if graph.is_halo(x) {
                return None;
            }
            let sum: f64 = graph
                .neighbors(x)
                .iter()
                .zip(&edge_distance[x])
                .map(|(nb, d)| nb.weight * d * d)
                .sum();
            Some(sum / graph.measure(x))
        })
        .collect();
    let intrinsic_defect = defects.iter().flatten().copied().fold(0.0, f64::max);
    let cache = (0..graph.len()).map(|_| OnceLock::new()).collect();
    PseudoMetric {
        root,
        sigma,
        edge_distance,
        root_distance,
        jump,
        defects,
        intrinsic_defect,
        cache,
    }
}

/// `B_r(x0) = { x : d(x, x0) < r }`, sorted by vertex id.
///
/// Fails when the ball would contain a halo vertex.
pub fn ball(graph: &WeightedGraph, metric: &PseudoMetric, x0: usize, r: f64) -> Result<Vec<usize>> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::NegativeRadius { radius: r });
    }
    let dist = metric.distances_from(graph, x0);
    let mut out = Vec::new();
    for (x, &d) in dist.iter().enumerate() {
        if d < r {
            if graph.is_halo(x) {
                return Err(Error::RadiusExceedsTruncation { radius: r });
            }
            out.push(x);
        }
    }
    Ok(out)
}
