//! Synthetic instances.

use decospan_core::metric::lp_distance;
use decospan_core::{rng, MetricSpace, PointSet, WeightedGraph};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{CliError, Result};

fn check_size(n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(CliError::invalid("n and d must be positive"));
    }
    Ok(())
}

/// `n` standard Gaussian points in `d` dimensions under the `ℓ_p` norm.
pub fn gaussian(n: usize, d: usize, p: f64, seed: u64) -> Result<PointSet> {
    check_size(n, d)?;
    let mut r = rng::stream(seed, "gen/gaussian");
    let coords = (0..n * d).map(|_| StandardNormal.sample(&mut r)).collect();
    Ok(PointSet::new(d, p, coords)?)
}

/// `n` uniform points of `[0, 1]^d` under the `ℓ_p` norm.
pub fn hypercube(n: usize, d: usize, p: f64, seed: u64) -> Result<PointSet> {
    check_size(n, d)?;
    let mut r = rng::stream(seed, "gen/hypercube");
    let coords = (0..n * d).map(|_| r.random::<f64>()).collect();
    Ok(PointSet::new(d, p, coords)?)
}

/// `k × k` grid with unit edges between 4-neighbors; `2k(k-1)` edges.
pub fn grid(k: usize) -> Result<WeightedGraph> {
    if k < 2 {
        return Err(CliError::invalid("grid side must be at least 2"));
    }
    let id = |r: usize, c: usize| r * k + c;
    let mut edges = Vec::with_capacity(2 * k * (k - 1));
    for r in 0..k {
        for c in 0..k {
            if c + 1 < k {
                edges.push((id(r, c), id(r, c + 1), 1.0));
            }
            if r + 1 < k {
                edges.push((id(r, c), id(r + 1, c), 1.0));
            }
        }
    }
    Ok(WeightedGraph::new(k * k, edges)?)
}

/// `n` uniform points of the unit square, joined when within `radius`, plus
/// the edges of their Euclidean MST so the graph is always connected.
/// Weights are Euclidean lengths.
pub fn geometric_graph(n: usize, radius: f64, seed: u64) -> Result<WeightedGraph> {
    if n < 2 || !(radius > 0.0 && radius.is_finite()) {
        return Err(CliError::invalid("need n >= 2 and a positive radius"));
    }
    let points = hypercube(n, 2, 2.0, seed)?;
    let mut edges = std::collections::BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = lp_distance(points.point(i), points.point(j), 2.0);
            if d <= radius {
                edges.insert((i, j), d);
            }
        }
    }
    for (i, j, w) in MetricSpace::from_points(points).mst().tree_edges {
        edges.insert((i, j), w);
    }
    Ok(WeightedGraph::new(n, edges.into_iter().map(|((i, j), w)| (i, j, w)).collect())?)
}
