//! Spanners from covering batches of low-diameter partitions.
//!
//! For every scale `Δ_i = (1+ε)^i` the builder takes the level-`i` net of a
//! hierarchy with radii `ε·Δ_i`, draws a covering batch of partitions of that
//! net at scale `(1+2ε)·Δ_i`, and connects each cluster to its center. The
//! center of a cluster is the member that survives highest in the hierarchy,
//! ties going to the smallest index.
//!
//! Every pair ends up with stretch at most [`effective_stretch`]`(ε, t)`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::decomp::{covering_batch, CoveringOptions, DecompositionScheme, Partition, DEFAULT_ROUND_CAP};
use crate::math::{self, le_rel};
use crate::nets::HierarchicalNet;
use crate::paths::{Adjacency, Search, NO_PARENT};
use crate::{Error, MetricSpace, Result};

/// Largest accepted ε (exclusive).
pub const EPS_MAX: f64 = 0.125;

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < EPS_MAX {
        Ok(())
    } else {
        Err(Error::EpsOutOfRange(eps))
    }
}

/// Scales `Δ_i = (1+ε)^i` for `i = 0..=top_index`, where `top_index` is the
/// least `k` with `(1+ε)^k >= upper`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleLadder {
    pub eps: f64,
    pub top_index: usize,
    pub scales: Vec<f64>,
}

impl ScaleLadder {
    pub fn new(eps: f64, upper: f64) -> Result<Self> {
        check_eps(eps)?;
        if !(upper >= 1.0 && upper.is_finite()) {
            return Err(Error::invalid("scale ladder needs an upper end >= 1"));
        }
        let mut scales = vec![1.0];
        // tolerance absorbs rounding in the running product
        while *scales.last().expect("non-empty") < upper * (1.0 - 1e-12) {
            let next = scales.last().expect("non-empty") * (1.0 + eps);
            scales.push(next);
        }
        Ok(ScaleLadder {
            eps,
            top_index: scales.len() - 1,
            scales,
        })
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    /// Net radii `ε·Δ_i`.
    pub fn net_radii(&self) -> Vec<f64> {
        self.scales.iter().map(|d| self.eps * d).collect()
    }
}

/// `α = 2(1+2ε)t / (1/(1+ε) − 2ε)`, the stretch the construction guarantees.
pub fn effective_stretch(eps: f64, t: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(2.0 * (1.0 + 2.0 * eps) * t / (1.0 / (1.0 + eps) - 2.0 * eps))
}

/// Largest `ε'` in `(0, 1/8)` with `effective_stretch(ε', t) <= t·(2+ε)`,
/// found by bisection.
pub fn eps_for_stretch(eps: f64, t: f64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::EpsOutOfRange(eps));
    }
    if !(t >= 1.0 && t.is_finite()) {
        return Err(Error::invalid("t must be at least 1"));
    }
    let target = t * (2.0 + eps);
    let alpha = |e: f64| 2.0 * (1.0 + 2.0 * e) * t / (1.0 / (1.0 + e) - 2.0 * e);
    let (mut lo, mut hi) = (0.0, EPS_MAX);
    // 50 halvings leave the bracket a few ulps wide, so `lo` stays below EPS_MAX
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if alpha(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo > 0.0 {
        Ok(lo)
    } else {
        Err(Error::EpsOutOfRange(eps))
    }
}

/// What one scale contributed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleRecord {
    pub i: usize,
    pub delta_i: f64,
    pub n_i: usize,
    /// Initial covering batch size.
    pub phi_i: usize,
    pub edges_added: usize,
    pub weight_added: f64,
    pub resample_rounds: usize,
}

/// Edges one partition asked for, before deduplication.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionTrace {
    pub scale: usize,
    pub partition: Partition,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub round_cap: usize,
    /// Keep every partition and the edges it requested.
    pub trace: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            round_cap: DEFAULT_ROUND_CAP,
            trace: false,
        }
    }
}

/// A spanner over the indices of a metric space. Weights are in the
/// normalized units of the space it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Spanner {
    pub n: usize,
    /// `(u, v, w)` with `u < v`, in the order they were first added.
    pub edges: Vec<(usize, usize, f64)>,
    pub build_log: Vec<ScaleRecord>,
    pub eps: f64,
    pub t: f64,
    pub trace: Option<Vec<PartitionTrace>>,
}

impl Spanner {
    pub fn empty(n: usize, eps: f64, t: f64) -> Self {
        Spanner {
            n,
            edges: Vec::new(),
            build_log: Vec::new(),
            eps,
            t,
            trace: None,
        }
    }

    pub fn weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn alpha(&self) -> Result<f64> {
        effective_stretch(self.eps, self.t)
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::from_edges(self.n, self.edges.iter().copied())
    }
}

struct EdgeSet {
    seen: BTreeSet<(usize, usize)>,
    edges: Vec<(usize, usize, f64)>,
}

impl EdgeSet {
    fn new() -> Self {
        EdgeSet {
            seen: BTreeSet::new(),
            edges: Vec::new(),
        }
    }

    /// Adds `{u, v}` unless present; returns whether it was new.
    fn insert(&mut self, u: usize, v: usize, w: f64) -> bool {
        let key = (u.min(v), u.max(v));
        if self.seen.insert(key) {
            self.edges.push((key.0, key.1, w));
            true
        } else {
            false
        }
    }
}

/// Member of `cluster` with the highest net level, smallest index on ties.
fn center_of(cluster: &[usize], hierarchy: &HierarchicalNet) -> usize {
    let mut best = cluster[0];
    for &x in &cluster[1..] {
        if hierarchy.net_level(x) > hierarchy.net_level(best) {
            best = x;
        }
    }
    best
}

struct Ladder {
    ladder: ScaleLadder,
    hierarchy: HierarchicalNet,
}

fn ladder_and_hierarchy(space: &MetricSpace, eps: f64, upper: f64) -> Result<Ladder> {
    let ladder = ScaleLadder::new(eps, upper.max(1.0))?;
    let hierarchy = HierarchicalNet::build(space, &ladder.net_radii())?;
    Ok(Ladder { ladder, hierarchy })
}

fn check_scheme(space: &MetricSpace, scheme: &dyn DecompositionScheme) -> Result<f64> {
    let t = scheme.params().t;
    if space.is_empty() {
        return Err(Error::invalid("empty metric space"));
    }
    Ok(t)
}

/// Builds a spanner of a normalized metric space.
pub fn build_spanner(
    space: &MetricSpace,
    scheme: &dyn DecompositionScheme,
    eps: f64,
    rng: &mut dyn RngCore,
) -> Result<Spanner> {
    build_points(space, scheme, eps, None, BuildOptions::default(), rng)
}

/// [`build_spanner`] with options.
pub fn build_spanner_with(
    space: &MetricSpace,
    scheme: &dyn DecompositionScheme,
    eps: f64,
    options: BuildOptions,
    rng: &mut dyn RngCore,
) -> Result<Spanner> {
    build_points(space, scheme, eps, None, options, rng)
}

/// Like [`build_spanner`], but the batch at a scale with `n_i` net points
/// assumes co-clustering probability `n_i^(-beta)`, so it holds
/// `⌈2·n_i^beta·ln n_i⌉` partitions.
pub fn build_spanner_subset_decomposable(
    space: &MetricSpace,
    scheme: &dyn DecompositionScheme,
    eps: f64,
    beta: f64,
    options: BuildOptions,
    rng: &mut dyn RngCore,
) -> Result<Spanner> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid("beta must lie in (0, 1)"));
    }
    build_points(space, scheme, eps, Some(beta), options, rng)
}

fn build_points(
    space: &MetricSpace,
    scheme: &dyn DecompositionScheme,
    eps: f64,
    beta: Option<f64>,
    options: BuildOptions,
    rng: &mut dyn RngCore,
) -> Result<Spanner> {
    check_eps(eps)?;
    let t = check_scheme(space, scheme)?;
    let n = space.len();
    let mut spanner = Spanner::empty(n, eps, t);
    if n == 1 {
        return Ok(spanner);
    }
    let Ladder { ladder, hierarchy } = ladder_and_hierarchy(space, eps, space.mst().weight)?;
    let mut set = EdgeSet::new();
    let mut trace = options.trace.then(Vec::new);

    for (i, &delta_i) in ladder.scales.iter().enumerate() {
        let domain = &hierarchy.levels[i].members;
        let scale = (1.0 + 2.0 * eps) * delta_i;
        let covering = CoveringOptions {
            delta: beta.map(|b| math::powf(domain.len() as f64, -b)),
            round_cap: options.round_cap,
        };
        let batch = covering_batch(scheme, space, domain, domain, scale, covering, rng)
            .map_err(|e| e.at_scale(i))?;
        let before = set.edges.len();
        for partition in batch.partitions {
            let mut requested = Vec::new();
            for cluster in partition.clusters() {
                let c = center_of(cluster, &hierarchy);
                for &x in cluster {
                    if x != c {
                        set.insert(x, c, space.dist(x, c));
                        requested.push((x.min(c), x.max(c)));
                    }
                }
            }
            if let Some(trace) = trace.as_mut() {
                trace.push(PartitionTrace {
                    scale: i,
                    partition,
                    edges: requested,
                });
            }
        }
        spanner.build_log.push(ScaleRecord {
            i,
            delta_i,
            n_i: domain.len(),
            phi_i: batch.phi,
            edges_added: set.edges.len() - before,
            weight_added: set.edges[before..].iter().map(|e| e.2).sum(),
            resample_rounds: batch.resample_rounds,
        });
    }
    spanner.edges = set.edges;
    spanner.trace = trace;
    Ok(spanner)
}

/// Spanner of a normalized graph metric that only uses graph edges.
///
/// Scales run up to the aspect ratio. Partitions cover all vertices, only
/// net-point pairs must be co-clustered, and every cluster contributes a
/// shortest-path tree of its induced subgraph from the center to the net
/// points it holds. The scheme must produce clusters with bounded strong
/// diameter.
pub fn build_graph_spanner(
    space: &MetricSpace,
    scheme: &dyn DecompositionScheme,
    eps: f64,
    options: BuildOptions,
    rng: &mut dyn RngCore,
) -> Result<Spanner> {
    check_eps(eps)?;
    let t = check_scheme(space, scheme)?;
    let (graph, adj) = match (space.graph(), space.graph_adjacency()) {
        (Some(g), Some(a)) => (g, a),
        _ => {
            return Err(Error::SchemeMismatch {
                scheme: scheme.name(),
                backing: space.backing_name(),
            })
        }
    };
    let n = space.len();
    let mut spanner = Spanner::empty(n, eps, t);
    if n == 1 {
        return Ok(spanner);
    }
    let Ladder { ladder, hierarchy } = ladder_and_hierarchy(space, eps, graph.aspect_ratio()?)?;
    let s = space.scale_factor();
    let all: Vec<usize> = (0..n).collect();
    let mut in_cluster = vec![false; n];
    let mut on_tree = vec![false; n];
    let mut search = Search::new(n);
    let mut set = EdgeSet::new();
    let mut trace = options.trace.then(Vec::new);

    for (i, &delta_i) in ladder.scales.iter().enumerate() {
        let net = &hierarchy.levels[i];
        let scale = (1.0 + 2.0 * eps) * delta_i;
        let covering = CoveringOptions {
            delta: None,
            round_cap: options.round_cap,
        };
        let batch = covering_batch(scheme, space, &all, &net.members, scale, covering, rng)
            .map_err(|e| e.at_scale(i))?;
        let before = set.edges.len();
        for partition in batch.partitions {
            let mut requested = Vec::new();
            for cluster in partition.clusters() {
                let c = center_of(cluster, &hierarchy);
                for &x in cluster {
                    in_cluster[x] = true;
                }
                search.run(adj, c, |v| in_cluster[v], None);
                on_tree[c] = true;
                for &x in cluster {
                    if x == c || !net.contains(x) {
                        continue;
                    }
                    if search.dist[x].is_infinite() {
                        return Err(Error::DisconnectedCluster { center: c, point: x }.at_scale(i));
                    }
                    // walk up until the path joins the part of the tree already taken
                    let mut v = x;
                    while !on_tree[v] {
                        on_tree[v] = true;
                        let u = search.parent[v];
                        debug_assert_ne!(u, NO_PARENT);
                        requested.push((u.min(v), u.max(v)));
                        let w = graph.edge_weight(u, v).expect("tree edges are graph edges");
                        set.insert(u, v, w * s);
                        v = u;
                    }
                }
                for &x in cluster {
                    in_cluster[x] = false;
                    on_tree[x] = false;
                }
            }
            if let Some(trace) = trace.as_mut() {
                trace.push(PartitionTrace {
                    scale: i,
                    partition,
                    edges: requested,
                });
            }
        }
        spanner.build_log.push(ScaleRecord {
            i,
            delta_i,
            n_i: net.len(),
            phi_i: batch.phi,
            edges_added: set.edges.len() - before,
            weight_added: set.edges[before..].iter().map(|e| e.2).sum(),
            resample_rounds: batch.resample_rounds,
        });
    }
    spanner.edges = set.edges;
    spanner.trace = trace;
    Ok(spanner)
}

/// Checks that every spanner edge weight matches the space within `1e-9`
/// relative, and that there are no loops or repeated edges.
pub fn edges_consistent(space: &MetricSpace, spanner: &Spanner) -> bool {
    let mut seen = BTreeSet::new();
    spanner.edges.iter().all(|&(u, v, w)| {
        u < v
            && v < spanner.n
            && w > 0.0
            && seen.insert((u, v))
            && le_rel(w, space.dist(u, v))
            && le_rel(space.dist(u, v), w)
    })
}
