#![allow(clippy::needless_range_loop)]

#![allow(dead_code)]

use decospan_core::{MetricSpace, PointSet, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(n: usize, d: usize, p: f64, seed: u64) -> MetricSpace {
    let mut r = rng(seed);
    let coords: Vec<f64> = (0..n * d).map(|_| StandardNormal.sample(&mut r)).collect();
    MetricSpace::from_points(PointSet::new(d, p, coords).unwrap())
        .normalize()
        .unwrap()
}

pub fn cube(n: usize, d: usize, seed: u64) -> MetricSpace {
    let mut r = rng(seed);
    let coords: Vec<f64> = (0..n * d).map(|_| r.random::<f64>()).collect();
    MetricSpace::from_points(PointSet::new(d, 2.0, coords).unwrap())
        .normalize()
        .unwrap()
}

pub fn path_graph(n: usize) -> WeightedGraph {
    WeightedGraph::new(n, (1..n).map(|v| (v - 1, v, 1.0)).collect()).unwrap()
}

pub fn grid_graph(k: usize) -> WeightedGraph {
    let id = |r: usize, c: usize| r * k + c;
    let mut edges = Vec::new();
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
    WeightedGraph::new(k * k, edges).unwrap()
}

/// Random points in the unit square joined within `radius`, plus a chain
/// through all points in x-order so the graph is connected.
pub fn geometric_graph(n: usize, radius: f64, seed: u64) -> WeightedGraph {
    let mut r = rng(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (r.random(), r.random())).collect();
    let dist = |a: usize, b: usize| ((pts[a].0 - pts[b].0).powi(2) + (pts[a].1 - pts[b].1).powi(2)).sqrt();
    let mut keep = std::collections::BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            if dist(a, b) <= radius {
                keep.insert((a, b));
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pts[a].0.total_cmp(&pts[b].0));
    for w in order.windows(2) {
        keep.insert((w[0].min(w[1]), w[0].max(w[1])));
    }
    WeightedGraph::new(n, keep.into_iter().map(|(a, b)| (a, b, dist(a, b))).collect()).unwrap()
}

/// Floyd–Warshall over `n` vertices and undirected weighted edges.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, v, w) in edges {
        if w < d[u][v] {
            d[u][v] = w;
            d[v][u] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i][k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let cand = dik + d[k][j];
                if cand < d[i][j] {
                    d[i][j] = cand;
                }
            }
        }
    }
    d
}

pub struct Dsu(Vec<usize>);

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    /// False if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// Kruskal over the complete distance graph of `space`; edges as `(i, j, w)`
/// with `i < j`.
pub fn kruskal(space: &MetricSpace) -> Vec<(usize, usize, f64)> {
    let n = space.len();
    let mut all = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            all.push((space.dist(i, j), i, j));
        }
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut dsu = Dsu::new(n);
    all.into_iter()
        .filter(|&(_, i, j)| dsu.union(i, j))
        .map(|(w, i, j)| (i, j, w))
        .collect()
}

/// Sum of weights taken in ascending order, so equal multisets give equal sums.
pub fn canonical_sum(edges: &[(usize, usize, f64)]) -> f64 {
    let mut w: Vec<f64> = edges.iter().map(|e| e.2).collect();
    w.sort_by(f64::total_cmp);
    w.into_iter().sum()
}

/// Brute-force maximum of `d_H / d_X` over all pairs.
pub fn brute_stretch(space: &MetricSpace, edges: &[(usize, usize, f64)]) -> (f64, f64) {
    let n = space.len();
    let dh = floyd_warshall(n, edges);
    let (mut hi, mut lo) = (1.0f64, f64::INFINITY);
    for i in 0..n {
        for j in i + 1..n {
            let r = dh[i][j] / space.dist(i, j);
            hi = hi.max(r);
            lo = lo.min(r);
        }
    }
    (hi, lo)
}

/// Area share of two radius-`r` discs whose centers are `u` apart.
pub fn lens_ratio(u: f64, r: f64) -> f64 {
    if u >= 2.0 * r {
        return 0.0;
    }
    let area = 2.0 * r * r * (u / (2.0 * r)).acos() - 0.5 * u * (4.0 * r * r - u * u).sqrt();
    area / (std::f64::consts::PI * r * r)
}
