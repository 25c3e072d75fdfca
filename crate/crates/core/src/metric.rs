//! Finite metric spaces: ℓ_p point sets and shortest-path metrics of
//! weighted graphs, plus exact minimum spanning trees.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use serde::{Deserialize, Serialize};

use crate::math::{self, Ordf};
use crate::paths::{self, Adjacency};
use crate::{Error, Result};

/// Graphs up to this many vertices get a cached all-pairs distance table.
pub const APSP_CACHE_LIMIT: usize = 4096;
/// Point sets up to this size get a cached distance table.
pub const POINT_CACHE_LIMIT: usize = 2048;

/// `n` points in `d` dimensions under the ℓ_p norm, `1 <= p <= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dim: usize,
    p: f64,
    coords: Vec<f64>,
}

impl PointSet {
    /// Builds from row-major coordinates. Rejects non-finite values and
    /// duplicate points.
    pub fn new(dim: usize, p: f64, mut coords: Vec<f64>) -> Result<Self> {
        if !(1.0..=2.0).contains(&p) {
            return Err(Error::UnsupportedNorm(p));
        }
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not form rows of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite coordinate in point {}",
                pos / dim
            )));
        }
        // -0.0 and 0.0 must compare equal for the duplicate scan
        for c in coords.iter_mut() {
            *c += 0.0;
        }
        let set = PointSet { dim, p, coords };
        set.check_distinct()?;
        Ok(set)
    }

    pub fn from_rows(p: f64, rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("rows have differing dimension"));
        }
        PointSet::new(dim, p, rows.concat())
    }

    fn check_distinct(&self) -> Result<()> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.point(a)
                .iter()
                .zip(self.point(b))
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        for w in order.windows(2) {
            if self.point(w[0]) == self.point(w[1]) {
                let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(Error::DuplicatePoints(a, b));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Unscaled ℓ_p distance.
    pub fn raw_distance(&self, i: usize, j: usize) -> f64 {
        lp_distance(self.point(i), self.point(j), self.p)
    }
}

/// ℓ_p distance between two coordinate slices.
pub fn lp_distance(a: &[f64], b: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        math::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
    } else if p == 1.0 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    } else {
        let s: f64 = a.iter().zip(b).map(|(x, y)| math::powf((x - y).abs(), p)).sum();
        math::powf(s, 1.0 / p)
    }
}

/// Connected, simple, positively weighted undirected graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph needs at least one vertex"));
        }
        let mut seen: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v, w) in &edges {
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange {
                    index: u.max(v),
                    len: n,
                });
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid(format!("edge {u}-{v} has weight {w}")));
            }
            seen.push((u.min(v), u.max(v)));
        }
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!(
                "duplicate edge {}-{}",
                w[0].0, w[0].1
            )));
        }
        let graph = WeightedGraph { n, edges };
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(graph)
    }

    fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.n);
        let mut parts = self.n;
        for &(u, v, _) in &self.edges {
            if uf.union(u, v) {
                parts -= 1;
            }
        }
        parts == 1
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::from_edges(self.n, self.edges.iter().copied())
    }

    /// `max w(e) / min w(e)`.
    pub fn aspect_ratio(&self) -> Result<f64> {
        let (lo, hi) = self
            .edges
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), e| (lo.min(e.2), hi.max(e.2)));
        if self.edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok(hi / lo)
    }

    /// Weight of the edge `{u, v}` if present.
    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        self.edges
            .iter()
            .find(|&&(a, b, _)| (a == u && b == v) || (a == v && b == u))
            .map(|e| e.2)
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `false` if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

#[derive(Debug, Clone)]
struct GraphMetric {
    graph: WeightedGraph,
    adjacency: Adjacency,
}

#[derive(Debug, Clone)]
enum Backing {
    Points(PointSet),
    Graph(GraphMetric),
}

/// Distance oracle over a point set or a graph, with a recorded scale factor.
#[derive(Debug, Clone)]
pub struct MetricSpace {
    backing: Backing,
    /// Row-major raw distances, for small inputs.
    table: Option<Vec<f64>>,
    scale: f64,
}

/// Exact MST of a metric space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MstSummary {
    /// `(i, j, w)` with `i < j`, in insertion order.
    pub tree_edges: Vec<(usize, usize, f64)>,
    pub weight: f64,
}

impl MetricSpace {
    pub fn from_points(points: PointSet) -> Self {
        let n = points.len();
        let table = (n <= POINT_CACHE_LIMIT).then(|| {
            let mut table = vec![0.0; n * n];
            for i in 0..n {
                for j in i + 1..n {
                    let d = points.raw_distance(i, j);
                    table[i * n + j] = d;
                    table[j * n + i] = d;
                }
            }
            table
        });
        MetricSpace {
            backing: Backing::Points(points),
            table,
            scale: 1.0,
        }
    }

    pub fn from_graph(graph: WeightedGraph) -> Self {
        let adjacency = graph.adjacency();
        let n = graph.len();
        let table = (n <= APSP_CACHE_LIMIT).then(|| {
            let mut table = Vec::with_capacity(n * n);
            for s in 0..n {
                table.extend(paths::dijkstra(&adjacency, s));
            }
            table
        });
        MetricSpace {
            backing: Backing::Graph(GraphMetric { graph, adjacency }),
            table,
            scale: 1.0,
        }
    }

    pub fn len(&self) -> usize {
        match &self.backing {
            Backing::Points(p) => p.len(),
            Backing::Graph(g) => g.graph.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multiplier applied to raw distances.
    pub fn scale_factor(&self) -> f64 {
        self.scale
    }

    pub fn points(&self) -> Option<&PointSet> {
        match &self.backing {
            Backing::Points(p) => Some(p),
            Backing::Graph(_) => None,
        }
    }

    pub fn graph(&self) -> Option<&WeightedGraph> {
        match &self.backing {
            Backing::Graph(g) => Some(&g.graph),
            Backing::Points(_) => None,
        }
    }

    /// Adjacency of the backing graph (raw weights).
    pub fn graph_adjacency(&self) -> Option<&Adjacency> {
        match &self.backing {
            Backing::Graph(g) => Some(&g.adjacency),
            Backing::Points(_) => None,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(&self.backing, Backing::Points(p) if p.p() == 2.0)
    }

    pub fn backing_name(&self) -> &'static str {
        match &self.backing {
            Backing::Points(p) if p.p() == 2.0 => "Euclidean point set",
            Backing::Points(_) => "l_p point set",
            Backing::Graph(_) => "graph",
        }
    }

    /// Checked distance.
    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        let len = self.len();
        for index in [i, j] {
            if index >= len {
                return Err(Error::IndexOutOfRange { index, len });
            }
        }
        Ok(self.dist(i, j))
    }

    /// Scaled distance. Panics if an index is out of range.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        self.raw_distance(i, j) * self.scale
    }

    /// Distance in the input's original units.
    pub fn raw_distance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        if let Some(table) = &self.table {
            return table[i * self.len() + j];
        }
        match &self.backing {
            Backing::Points(p) => p.raw_distance(i, j),
            Backing::Graph(g) => paths::dijkstra_pair(&g.adjacency, i, j),
        }
    }

    /// Rescales so that the minimum pairwise distance is 1. Idempotent; a
    /// single-point space keeps factor 1.
    pub fn normalize(mut self) -> Result<Self> {
        let n = self.len();
        if n < 2 {
            self.scale = 1.0;
            return Ok(self);
        }
        let (min, pair) = match &self.backing {
            Backing::Points(p) => {
                let mut best = (f64::INFINITY, (0, 1));
                for i in 0..n {
                    for j in i + 1..n {
                        let d = p.raw_distance(i, j);
                        if d < best.0 {
                            best = (d, (i, j));
                        }
                    }
                }
                best
            }
            // positive weights: the closest pair is always joined by an edge
            Backing::Graph(g) => g
                .graph
                .edges()
                .iter()
                .map(|&(u, v, w)| (w, (u, v)))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .expect("connected graph with n >= 2 has an edge"),
        };
        if !(min > 0.0) {
            return Err(Error::DuplicatePoints(pair.0, pair.1));
        }
        self.scale = 1.0 / min;
        Ok(self)
    }

    /// Exact minimum spanning tree; ties are broken by the lexicographic
    /// order of `(min(i, j), max(i, j))`.
    pub fn mst(&self) -> MstSummary {
        let tree_edges = match &self.backing {
            Backing::Points(_) => self.dense_prim(),
            Backing::Graph(g) => self.graph_prim(&g.adjacency),
        };
        let weight = tree_edges.iter().map(|e| e.2).sum();
        MstSummary { tree_edges, weight }
    }

    fn dense_prim(&self) -> Vec<(usize, usize, f64)> {
        let n = self.len();
        let mut tree = Vec::with_capacity(n.saturating_sub(1));
        if n < 2 {
            return tree;
        }
        let mut in_tree = vec![false; n];
        // (weight, edge key) of the cheapest link into the tree
        let mut best: Vec<(f64, (usize, usize))> = vec![(f64::INFINITY, (usize::MAX, usize::MAX)); n];
        let mut last = 0;
        in_tree[0] = true;
        for _ in 1..n {
            let mut pick = usize::MAX;
            for v in 0..n {
                if in_tree[v] {
                    continue;
                }
                let cand = (self.dist(last, v), edge_key(last, v));
                if lex_less(cand, best[v]) {
                    best[v] = cand;
                }
                if pick == usize::MAX || lex_less(best[v], best[pick]) {
                    pick = v;
                }
            }
            in_tree[pick] = true;
            let (w, (a, b)) = best[pick];
            tree.push((a, b, w));
            last = pick;
        }
        tree
    }

    fn graph_prim(&self, adj: &Adjacency) -> Vec<(usize, usize, f64)> {
        let n = self.len();
        let mut tree = Vec::with_capacity(n.saturating_sub(1));
        let mut in_tree = vec![false; n];
        let mut heap = BinaryHeap::new();
        let visit = |u: usize, heap: &mut BinaryHeap<_>, in_tree: &mut Vec<bool>| {
            in_tree[u] = true;
            for (v, w) in adj.neighbors(u) {
                if !in_tree[v] {
                    heap.push(Reverse((Ordf(w * self.scale), edge_key(u, v), v)));
                }
            }
        };
        visit(0, &mut heap, &mut in_tree);
        while let Some(Reverse((Ordf(w), (a, b), v))) = heap.pop() {
            if in_tree[v] {
                continue;
            }
            tree.push((a, b, w));
            visit(v, &mut heap, &mut in_tree);
        }
        tree
    }
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn lex_less(a: (f64, (usize, usize)), b: (f64, (usize, usize))) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}
