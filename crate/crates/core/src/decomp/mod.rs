//! Stochastic low-diameter decompositions.
//!
//! A [`DecompositionScheme`] samples partitions of a domain whose clusters
//! have diameter at most `t·Δ`, and co-clusters pairs within `Δ` with some
//! probability `δ`. Schemes here:
//!
//! * [`BallCarving`] for Euclidean point sets,
//! * [`LshScheme`], p-stable LSH turned into partitions by bucket eviction,
//! * [`RandomShift`], shifted balls around a net, for any metric,
//! * [`StrongGraph`], exponential-shift clustering with bounded strong diameter.
//!
//! [`covering_partitions`] draws enough partitions that every close pair is
//! clustered together at least once, and verifies it.

use alloc::boxed::Box;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::{Error, MetricSpace, Result};

mod carving;
mod covering;
mod lsh;
mod partition;
mod shift;
mod strong;

pub use carving::{ball_carving, cap_ratio_mc, uniform_in_ball, BallCarving};
pub use covering::{
    close_pairs, covering_batch, covering_partitions, empirical_cluster_probability,
    estimate_delta, initial_phi, CoveringBatch, CoveringOptions, DEFAULT_ROUND_CAP,
};
pub use lsh::{
    empirical_collision_rate, lsh_amplify, lsh_to_partition, pstable_hash_family,
    sample_pstable, CollisionModel, Concatenated, HashFamily, LshFamily, LshScheme, PStable,
    PStableHash, PointHash,
};
pub use partition::{
    check_bounded, check_strongly_bounded, clusters_connected, max_weak_diameter, Partition,
};
pub use shift::{random_shift_net_partition, RandomShift};
pub use strong::{strong_graph_decomposition, StrongGraph};

/// Same-cluster probability promised by a scheme for pairs within `Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DeltaHint {
    Numeric(f64),
    /// Estimated by a pilot run before each covering batch.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Diameter blow-up, `t >= 1`.
    pub t: f64,
    pub delta: DeltaHint,
}

impl SchemeParams {
    pub fn new(t: f64, delta: DeltaHint) -> Result<Self> {
        if !(t >= 1.0 && t.is_finite()) {
            return Err(Error::invalid("t must be at least 1"));
        }
        if let DeltaHint::Numeric(d) = delta {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::invalid("delta must lie in (0, 1]"));
            }
        }
        Ok(SchemeParams { t, delta })
    }

    pub fn numeric_delta(&self) -> Option<f64> {
        match self.delta {
            DeltaHint::Numeric(d) => Some(d),
            DeltaHint::Adaptive => None,
        }
    }
}

/// Draws partitions for one fixed `(space, domain, Δ)`.
pub trait PartitionSampler {
    fn sample(&mut self, rng: &mut dyn RngCore) -> Result<Partition>;
}

/// A distribution over `t·Δ`-bounded partitions.
pub trait DecompositionScheme {
    fn name(&self) -> &'static str;

    fn params(&self) -> SchemeParams;

    /// Whether sampled partitions also have bounded strong diameter.
    fn is_strong(&self) -> bool {
        false
    }

    /// Precomputes whatever depends only on `(space, domain, scale)`.
    /// `domain` must be sorted and free of repeats.
    fn prepare<'a>(
        &'a self,
        space: &'a MetricSpace,
        domain: &[usize],
        scale: f64,
    ) -> Result<Box<dyn PartitionSampler + 'a>>;

    fn sample_partition(
        &self,
        space: &MetricSpace,
        domain: &[usize],
        scale: f64,
        rng: &mut dyn RngCore,
    ) -> Result<Partition> {
        self.prepare(space, domain, scale)?.sample(rng)
    }
}

pub(crate) fn validate_domain(space: &MetricSpace, domain: &[usize], scale: f64) -> Result<()> {
    if domain.is_empty() {
        return Err(Error::invalid("empty domain"));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::invalid("scale must be positive"));
    }
    if domain.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("domain must be strictly ascending"));
    }
    let last = *domain.last().expect("non-empty");
    if last >= space.len() {
        return Err(Error::IndexOutOfRange {
            index: last,
            len: space.len(),
        });
    }
    Ok(())
}
