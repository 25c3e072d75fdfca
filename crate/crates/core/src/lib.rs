//! Light, sparse spanners for finite metric spaces built from stochastic
//! low-diameter decompositions.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, timing and the
//! command line live in the `decospan` companion crate.
//!
//! The pipeline is:
//!
//! 1. wrap the input in a [`MetricSpace`] and [`MetricSpace::normalize`] it so
//!    that the minimum pairwise distance is 1;
//! 2. pick a [`decomp::DecompositionScheme`] (ball carving, p-stable LSH,
//!    random shifts, or strong exponential-shift clustering on graphs);
//! 3. call one of the builders in [`spanner`];
//! 4. measure the result with [`eval`].
#![cfg_attr(not(test), no_std)]
// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod decomp;
mod error;
pub mod eval;
pub mod math;
pub mod metric;
pub mod paths;
pub mod nets;
pub mod rng;
pub mod spanner;

pub use error::{Error, Result};
pub use metric::{MetricSpace, MstSummary, PointSet, WeightedGraph};
pub use nets::{HierarchicalNet, Net};
pub use spanner::Spanner;
