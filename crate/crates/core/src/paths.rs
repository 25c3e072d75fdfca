//! Compressed adjacency lists and single-source shortest paths.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::math::Ordf;

pub const NO_PARENT: usize = usize::MAX;

/// Undirected weighted graph in CSR layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl Adjacency {
    /// Builds from undirected edges; each edge is stored in both directions.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, f64)> + Clone,
    {
        let mut degree = vec![0usize; n + 1];
        for (u, v, _) in edges.clone() {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let m = offsets[n];
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; m];
        let mut weights = vec![0f64; m];
        for (u, v, w) in edges {
            targets[fill[u]] = v;
            weights[fill[u]] = w;
            fill[u] += 1;
            targets[fill[v]] = u;
            weights[fill[v]] = w;
            fill[v] += 1;
        }
        Adjacency {
            offsets,
            targets,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[u]..self.offsets[u + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }
}

/// Distances from `source` to every vertex; unreachable vertices get `f64::INFINITY`.
pub fn dijkstra(adj: &Adjacency, source: usize) -> Vec<f64> {
    let mut search = Search::new(adj.len());
    search.run(adj, source, |_| true, None);
    search.dist
}

/// Shortest distance between two vertices, stopping once `target` is settled.
pub fn dijkstra_pair(adj: &Adjacency, source: usize, target: usize) -> f64 {
    let mut search = Search::new(adj.len());
    search.run(adj, source, |_| true, Some(target));
    search.dist[target]
}

/// Reusable Dijkstra workspace. Only touched entries are reset between runs,
/// so many small searches on one large graph stay cheap.
#[derive(Debug, Clone)]
pub struct Search {
    pub dist: Vec<f64>,
    pub parent: Vec<usize>,
    touched: Vec<usize>,
    heap: BinaryHeap<Reverse<(Ordf, usize)>>,
}

impl Search {
    pub fn new(n: usize) -> Self {
        Search {
            dist: vec![f64::INFINITY; n],
            parent: vec![NO_PARENT; n],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v] = f64::INFINITY;
            self.parent[v] = NO_PARENT;
        }
        self.touched.clear();
        self.heap.clear();
    }

    /// Runs from `source` over vertices accepted by `allow` (the source is
    /// always allowed). Stops early once `target` is popped.
    pub fn run<F>(&mut self, adj: &Adjacency, source: usize, allow: F, target: Option<usize>)
    where
        F: Fn(usize) -> bool,
    {
        self.reset();
        self.dist[source] = 0.0;
        self.touched.push(source);
        self.heap.push(Reverse((Ordf(0.0), source)));
        while let Some(Reverse((Ordf(d), u))) = self.heap.pop() {
            if d > self.dist[u] {
                continue;
            }
            if target == Some(u) {
                break;
            }
            for (v, w) in adj.neighbors(u) {
                if !allow(v) {
                    continue;
                }
                let nd = d + w;
                if nd < self.dist[v] {
                    if self.dist[v].is_infinite() {
                        self.touched.push(v);
                    }
                    self.dist[v] = nd;
                    self.parent[v] = u;
                    self.heap.push(Reverse((Ordf(nd), v)));
                }
            }
        }
    }

    /// Vertices reached by the last run.
    pub fn reached(&self) -> &[usize] {
        &self.touched
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_distances() {
        let adj = Adjacency::from_edges(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0), (0, 3, 10.0)]);
        assert_eq!(dijkstra(&adj, 0), vec![0.0, 1.0, 3.0, 6.0]);
        assert_eq!(dijkstra_pair(&adj, 3, 0), 6.0);
    }

    #[test]
    fn filtered_search_respects_allow_set() {
        let adj = Adjacency::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]);
        let mut s = Search::new(3);
        s.run(&adj, 0, |v| v != 1, None);
        assert!(s.dist[2].is_infinite());
        s.run(&adj, 0, |_| true, None);
        assert_eq!(s.dist[2], 2.0);
        assert_eq!(s.parent[2], 1);
    }
}
