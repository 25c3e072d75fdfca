use alloc::boxed::Box;
use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use rand::RngCore;
use rand_distr::{Distribution, Exp1};

use super::{validate_domain, DecompositionScheme, DeltaHint, Partition, PartitionSampler, SchemeParams};
use crate::math::{self, Ordf};
use crate::paths::Adjacency;
use crate::{Error, MetricSpace, Result};

/// Exponential-shift clustering on a graph, with strong diameter at most `t·Δ`.
///
/// Every vertex `v` draws a head start `δ_v ~ Exp` with mean `t·Δ / (2 ln n)`.
/// A single Dijkstra run starts every vertex at time `-δ_v`; each vertex is
/// claimed by the first wave that reaches it, and a wave only travels through
/// vertices it has claimed and never farther than `t·Δ/2` from its source.
/// Clusters are therefore connected, with radius `t·Δ/2` inside their
/// induced subgraph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongGraph {
    t: f64,
}

impl StrongGraph {
    pub fn new(t: f64) -> Result<Self> {
        SchemeParams::new(t, DeltaHint::Adaptive)?;
        if !(t >= 2.0) {
            return Err(Error::invalid("strong graph decomposition needs t >= 2"));
        }
        Ok(StrongGraph { t })
    }
}

struct StrongSampler<'a> {
    adj: &'a Adjacency,
    weight_scale: f64,
    domain: Vec<usize>,
    /// Position in `domain` per vertex, or `usize::MAX` outside it.
    position: Vec<usize>,
    mean_shift: f64,
    radius: f64,
}

impl PartitionSampler for StrongSampler<'_> {
    fn sample(&mut self, rng: &mut dyn RngCore) -> Result<Partition> {
        let m = self.domain.len();
        let shift: Vec<f64> = (0..m)
            .map(|_| {
                let e: f64 = Exp1.sample(rng);
                e * self.mean_shift
            })
            .collect();
        let mut owner = vec![usize::MAX; m];
        let mut heap: BinaryHeap<Reverse<(Ordf, usize, usize)>> = (0..m)
            .map(|a| Reverse((Ordf(-shift[a]), a, a)))
            .collect();
        while let Some(Reverse((Ordf(time), a, src))) = heap.pop() {
            if owner[a] != usize::MAX {
                continue;
            }
            owner[a] = src;
            for (v, w) in self.adj.neighbors(self.domain[a]) {
                let b = self.position[v];
                if b == usize::MAX || owner[b] != usize::MAX {
                    continue;
                }
                let arrival = time + w * self.weight_scale;
                if arrival + shift[src] <= self.radius {
                    heap.push(Reverse((Ordf(arrival), b, src)));
                }
            }
        }
        Ok(Partition::from_labels(self.domain.clone(), owner))
    }
}

/// One strong partition of the whole graph at scale `scale`.
pub fn strong_graph_decomposition(
    space: &MetricSpace,
    scale: f64,
    t: f64,
    rng: &mut dyn RngCore,
) -> Result<Partition> {
    let all: Vec<usize> = (0..space.len()).collect();
    StrongGraph::new(t)?.sample_partition(space, &all, scale, rng)
}

impl DecompositionScheme for StrongGraph {
    fn name(&self) -> &'static str {
        "strong-graph"
    }

    fn params(&self) -> SchemeParams {
        SchemeParams {
            t: self.t,
            delta: DeltaHint::Adaptive,
        }
    }

    fn is_strong(&self) -> bool {
        true
    }

    fn prepare<'a>(
        &'a self,
        space: &'a MetricSpace,
        domain: &[usize],
        scale: f64,
    ) -> Result<Box<dyn PartitionSampler + 'a>> {
        validate_domain(space, domain, scale)?;
        let adj = space.graph_adjacency().ok_or(Error::SchemeMismatch {
            scheme: self.name(),
            backing: space.backing_name(),
        })?;
        let mut position = vec![usize::MAX; space.len()];
        for (a, &x) in domain.iter().enumerate() {
            position[x] = a;
        }
        let n = domain.len().max(2) as f64;
        Ok(Box::new(StrongSampler {
            adj,
            weight_scale: space.scale_factor(),
            domain: domain.to_vec(),
            position,
            mean_shift: self.t * scale / (2.0 * math::ln(n)),
            radius: self.t * scale / 2.0,
        }))
    }
}
