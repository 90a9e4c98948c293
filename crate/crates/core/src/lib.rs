//! Spectral bottoms, resolvent kernels, ends, parabolicity and l2 decay
//! estimates for subharmonic functions on weighted graphs.

// `!(x <= y)` is used on purpose so NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod decay;
pub mod domain;
pub mod entropy;
pub mod error;
pub mod family;
pub mod graph;
pub mod linalg;
pub mod metric;
pub mod operators;
pub mod oracles;
pub mod potential;

pub use error::{Error, Result};
pub use family::{build_family, FamilySpec, GraphFamily, MassLaw, Region};
pub use graph::{GraphBuilder, WeightedGraph};
pub use metric::{Metric, MetricKind, MetricSpec};
