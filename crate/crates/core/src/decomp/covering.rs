use alloc::vec::Vec;

use rand::{Rng, RngCore};

use super::{validate_domain, DecompositionScheme, Partition, PartitionSampler};
use crate::math::{self, le_rel};
use crate::{Error, MetricSpace, Result};

pub const DEFAULT_ROUND_CAP: usize = 16;
const PILOT_PARTITIONS: usize = 50;
const PILOT_PAIRS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveringOptions {
    /// Overrides the scheme's own δ.
    pub delta: Option<f64>,
    /// Maximum number of extra batches after the first.
    pub round_cap: usize,
}

impl Default for CoveringOptions {
    fn default() -> Self {
        CoveringOptions {
            delta: None,
            round_cap: DEFAULT_ROUND_CAP,
        }
    }
}

/// Partitions that jointly co-cluster every close pair of the cover set.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringBatch {
    /// `phi * (resample_rounds + 1)` partitions, in sampling order.
    pub partitions: Vec<Partition>,
    pub delta_used: f64,
    /// Batch size `⌈2 ln n / δ⌉`.
    pub phi: usize,
    pub resample_rounds: usize,
    /// Number of pairs within `Δ` that had to be covered.
    pub close_pairs: usize,
}

/// `⌈2 ln n / δ⌉`, or 0 when `n < 2`.
pub fn initial_phi(n: usize, delta: f64) -> usize {
    if n < 2 {
        return 0;
    }
    math::ceil(2.0 * math::ln(n as f64) / delta) as usize
}

/// All pairs of `set` at distance at most `scale`.
pub fn close_pairs(space: &MetricSpace, set: &[usize], scale: f64) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (a, &x) in set.iter().enumerate() {
        for &y in &set[a + 1..] {
            if le_rel(space.dist(x, y), scale) {
                pairs.push((x, y));
            }
        }
    }
    pairs
}

/// Covering batch over `domain` where every domain pair within `scale` must
/// be co-clustered.
pub fn covering_partitions(
    scheme: &dyn DecompositionScheme,
    space: &MetricSpace,
    domain: &[usize],
    scale: f64,
    rng: &mut dyn RngCore,
) -> Result<CoveringBatch> {
    covering_batch(
        scheme,
        space,
        domain,
        domain,
        scale,
        CoveringOptions::default(),
        rng,
    )
}

/// Partitions of `domain` such that every pair of `cover` (a subset of
/// `domain`) within `scale` is co-clustered at least once. The batch size
/// comes from `|cover|`.
pub fn covering_batch(
    scheme: &dyn DecompositionScheme,
    space: &MetricSpace,
    domain: &[usize],
    cover: &[usize],
    scale: f64,
    options: CoveringOptions,
    rng: &mut dyn RngCore,
) -> Result<CoveringBatch> {
    validate_domain(space, domain, scale)?;
    let position = |x: usize| {
        domain
            .binary_search(&x)
            .map_err(|_| Error::invalid("cover set is not contained in the domain"))
    };
    let pairs = close_pairs(space, cover, scale);
    let mut uncovered = pairs
        .iter()
        .map(|&(x, y)| Ok((position(x)?, position(y)?)))
        .collect::<Result<Vec<_>>>()?;
    let total = uncovered.len();

    let mut sampler = scheme.prepare(space, domain, scale)?;
    let n = cover.len();
    let delta = match options.delta.or(scheme.params().numeric_delta()) {
        Some(d) => d,
        None => pilot_delta(sampler.as_mut(), &uncovered, n, rng)?,
    };
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid("delta must lie in (0, 1]"));
    }
    let phi = initial_phi(n, delta);

    let mut partitions = Vec::with_capacity(phi);
    let mut rounds = 0;
    loop {
        for _ in 0..phi {
            let p = sampler.sample(rng)?;
            let labels = p.labels();
            uncovered.retain(|&(a, b)| labels[a] != labels[b]);
            partitions.push(p);
        }
        if uncovered.is_empty() {
            break;
        }
        if rounds == options.round_cap {
            return Err(Error::CoverageCapExceeded {
                rounds,
                covered: total - uncovered.len(),
                pairs: total,
            });
        }
        rounds += 1;
    }
    Ok(CoveringBatch {
        partitions,
        delta_used: delta,
        phi,
        resample_rounds: rounds,
        close_pairs: total,
    })
}

/// Pilot estimate of δ: the 10th-percentile co-clustering frequency over up
/// to 500 close pairs in 50 sampled partitions, floored at `1/n`.
pub fn estimate_delta(
    scheme: &dyn DecompositionScheme,
    space: &MetricSpace,
    domain: &[usize],
    scale: f64,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    validate_domain(space, domain, scale)?;
    let pairs: Vec<(usize, usize)> = close_pairs(space, domain, scale)
        .into_iter()
        .map(|(x, y)| {
            (
                domain.binary_search(&x).expect("in domain"),
                domain.binary_search(&y).expect("in domain"),
            )
        })
        .collect();
    let mut sampler = scheme.prepare(space, domain, scale)?;
    pilot_delta(sampler.as_mut(), &pairs, domain.len(), rng)
}

fn pilot_delta(
    sampler: &mut dyn PartitionSampler,
    pairs: &[(usize, usize)],
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    if pairs.is_empty() {
        return Ok(1.0);
    }
    let mut chosen = pairs.to_vec();
    if chosen.len() > PILOT_PAIRS {
        // partial Fisher-Yates
        for k in 0..PILOT_PAIRS {
            let j = rng.random_range(k..chosen.len());
            chosen.swap(k, j);
        }
        chosen.truncate(PILOT_PAIRS);
    }
    let mut hits = alloc::vec![0u32; chosen.len()];
    for _ in 0..PILOT_PARTITIONS {
        let p = sampler.sample(rng)?;
        let labels = p.labels();
        for (h, &(a, b)) in hits.iter_mut().zip(&chosen) {
            if labels[a] == labels[b] {
                *h += 1;
            }
        }
    }
    hits.sort_unstable();
    let rank = math::ceil(chosen.len() as f64 * 0.1).max(1.0) as usize - 1;
    let freq = f64::from(hits[rank]) / PILOT_PARTITIONS as f64;
    Ok(freq.max(1.0 / n.max(1) as f64).min(1.0))
}

/// Co-clustering frequency of `pair` over `trials` partitions of `domain`,
/// with its binomial standard error.
pub fn empirical_cluster_probability(
    scheme: &dyn DecompositionScheme,
    space: &MetricSpace,
    domain: &[usize],
    pair: (usize, usize),
    scale: f64,
    trials: usize,
    rng: &mut dyn RngCore,
) -> Result<(f64, f64)> {
    if trials < 30 {
        return Err(Error::invalid("at least 30 trials are required"));
    }
    let mut sampler = scheme.prepare(space, domain, scale)?;
    let mut hits = 0usize;
    for _ in 0..trials {
        if sampler.sample(rng)?.same_cluster(pair.0, pair.1) {
            hits += 1;
        }
    }
    let p = hits as f64 / trials as f64;
    Ok((p, math::sqrt(p * (1.0 - p) / trials as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_formula() {
        assert_eq!(initial_phi(100, 0.5), 19);
        assert_eq!(initial_phi(1, 0.5), 0);
        // ⌈2 ln 2⌉ = ⌈1.386⌉
        assert_eq!(initial_phi(2, 1.0), 2);
    }
}
