use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math::le_rel;
use crate::paths::Search;
use crate::MetricSpace;

/// A clustering of a sorted index set.
///
/// Cluster ids are canonical: clusters are numbered in order of their
/// smallest member, so two partitions with the same clusters compare equal.
/// Serializes as `{"domain": [...], "labels": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPartition", into = "RawPartition")]
pub struct Partition {
    domain: Vec<usize>,
    labels: Vec<usize>,
    clusters: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawPartition {
    domain: Vec<usize>,
    labels: Vec<usize>,
}

impl TryFrom<RawPartition> for Partition {
    type Error = &'static str;

    fn try_from(raw: RawPartition) -> Result<Self, Self::Error> {
        if raw.domain.len() != raw.labels.len() {
            return Err("domain and labels differ in length");
        }
        if raw.domain.windows(2).any(|w| w[0] >= w[1]) {
            return Err("domain must be strictly ascending");
        }
        Ok(Partition::from_labels(raw.domain, raw.labels))
    }
}

impl From<Partition> for RawPartition {
    fn from(p: Partition) -> Self {
        RawPartition {
            domain: p.domain,
            labels: p.labels,
        }
    }
}

impl Partition {
    /// `labels[k]` is an arbitrary cluster tag for `domain[k]`.
    /// The domain is sorted and must not contain repeats.
    pub fn from_labels(domain: Vec<usize>, labels: Vec<usize>) -> Self {
        assert_eq!(domain.len(), labels.len());
        let mut pairs: Vec<(usize, usize)> = domain.into_iter().zip(labels).collect();
        pairs.sort_unstable();
        debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));

        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut domain = Vec::with_capacity(pairs.len());
        let mut labels = Vec::with_capacity(pairs.len());
        let mut order: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        order.sort_unstable();
        order.dedup();
        let mut canon = vec![usize::MAX; order.len()];
        for (x, tag) in pairs {
            let slot = order.binary_search(&tag).expect("tag present");
            if canon[slot] == usize::MAX {
                canon[slot] = clusters.len();
                clusters.push(Vec::new());
            }
            let id = canon[slot];
            clusters[id].push(x);
            domain.push(x);
            labels.push(id);
        }
        Partition {
            domain,
            labels,
            clusters,
        }
    }

    pub fn from_clusters(clusters: Vec<Vec<usize>>) -> Self {
        let mut domain = Vec::new();
        let mut labels = Vec::new();
        for (id, c) in clusters.iter().enumerate() {
            for &x in c {
                domain.push(x);
                labels.push(id);
            }
        }
        Partition::from_labels(domain, labels)
    }

    /// Everything in one cluster.
    pub fn single(domain: Vec<usize>) -> Self {
        let labels = vec![0; domain.len()];
        Partition::from_labels(domain, labels)
    }

    pub fn singletons(domain: Vec<usize>) -> Self {
        let labels = (0..domain.len()).collect();
        Partition::from_labels(domain, labels)
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    /// Canonical cluster id per domain position.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn cluster_of(&self, x: usize) -> Option<usize> {
        self.domain.binary_search(&x).ok().map(|k| self.labels[k])
    }

    pub fn same_cluster(&self, x: usize, y: usize) -> bool {
        match (self.cluster_of(x), self.cluster_of(y)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }
}

/// Largest in-cluster distance (weak diameter).
pub fn max_weak_diameter(partition: &Partition, space: &MetricSpace) -> f64 {
    let mut worst = 0.0f64;
    for c in partition.clusters() {
        for (a, &x) in c.iter().enumerate() {
            for &y in &c[a + 1..] {
                worst = worst.max(space.dist(x, y));
            }
        }
    }
    worst
}

/// Every cluster has weak diameter at most `bound`.
pub fn check_bounded(partition: &Partition, space: &MetricSpace, bound: f64) -> bool {
    partition.clusters().iter().all(|c| {
        c.iter().enumerate().all(|(a, &x)| {
            c[a + 1..]
                .iter()
                .all(|&y| le_rel(space.dist(x, y), bound))
        })
    })
}

/// Every cluster has strong diameter (measured inside its induced subgraph)
/// at most `bound`. A disconnected cluster has infinite strong diameter.
/// Returns `false` for non-graph spaces.
pub fn check_strongly_bounded(partition: &Partition, space: &MetricSpace, bound: f64) -> bool {
    let Some(adj) = space.graph_adjacency() else {
        return false;
    };
    let scale = space.scale_factor();
    let mut inside = vec![false; space.len()];
    let mut search = Search::new(space.len());
    for c in partition.clusters() {
        for &x in c {
            inside[x] = true;
        }
        let ok = c.iter().all(|&s| {
            search.run(adj, s, |v| inside[v], None);
            c.iter().all(|&y| le_rel(search.dist[y] * scale, bound))
        });
        for &x in c {
            inside[x] = false;
        }
        if !ok {
            return false;
        }
    }
    true
}

/// Every cluster induces a connected subgraph.
pub fn clusters_connected(partition: &Partition, space: &MetricSpace) -> bool {
    let Some(adj) = space.graph_adjacency() else {
        return false;
    };
    let mut inside = vec![false; space.len()];
    let mut search = Search::new(space.len());
    partition.clusters().iter().all(|c| {
        for &x in c {
            inside[x] = true;
        }
        search.run(adj, c[0], |v| inside[v], None);
        let ok = c.iter().all(|&y| search.dist[y].is_finite());
        for &x in c {
            inside[x] = false;
        }
        ok
    })
}
