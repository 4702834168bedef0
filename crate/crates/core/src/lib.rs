//! Discrete Schrödinger-type equations `Δu − Vu = 0` on weighted graphs.
//!
//! The crate provides weighted graphs with path pseudo metrics, a Dirichlet
//! solver on finite interior sets, the monotone exhaustion schemes that build
//! bounded solutions on infinite graphs, and numerical checkers for the
//! inequalities behind the Liouville property. Homogeneous model trees come
//! with a radial reduction that serves as an independent reference solver.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod dirichlet;
pub mod error;
pub mod exhaustion;
pub mod generators;
pub mod graph;
pub mod io;
pub mod liouville;
pub mod metric;
pub mod radial;
mod sparse;

pub use error::{Error, Result};
pub use graph::{VertexField, WeightedGraph};
pub use metric::PseudoMetric;
