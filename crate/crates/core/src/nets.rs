//! Greedy r-nets and nested hierarchical nets.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, MetricSpace, Result};

/// An r-net: members are pairwise more than `radius` apart and every point
/// of the underlying set lies within `radius` of some member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Net {
    pub radius: f64,
    /// Sorted indices into the metric space.
    pub members: Vec<usize>,
}

impl Net {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    /// Net-size bound `|N| <= 2L / r` for an MST of weight `mst_weight`.
    pub fn within_size_bound(&self, mst_weight: f64) -> bool {
        self.members.len() as f64 <= 2.0 * mst_weight / self.radius
    }
}

/// Greedy r-net of the whole space.
pub fn build_net(space: &MetricSpace, radius: f64, seed: Option<&[usize]>) -> Result<Net> {
    let all: Vec<usize> = (0..space.len()).collect();
    build_net_on(space, &all, radius, seed)
}

/// Greedy r-net of `domain` (a list of space indices). Seed members are
/// kept; remaining points are scanned in the order of `domain` and added
/// whenever they are farther than `radius` from every current member.
pub fn build_net_on(
    space: &MetricSpace,
    domain: &[usize],
    radius: f64,
    seed: Option<&[usize]>,
) -> Result<Net> {
    if !(radius > 0.0) {
        return Err(Error::NonAscendingRadii);
    }
    let n = space.len();
    let mut members: Vec<usize> = Vec::new();
    let mut is_member = vec![false; n];
    if let Some(seed) = seed {
        for &s in seed {
            if s >= n {
                return Err(Error::IndexOutOfRange { index: s, len: n });
            }
            if let Some(&m) = members.iter().find(|&&m| space.dist(m, s) <= radius) {
                return Err(Error::SeedPacking(m.min(s), m.max(s)));
            }
            is_member[s] = true;
            members.push(s);
        }
    }
    for &x in domain {
        if x >= n {
            return Err(Error::IndexOutOfRange { index: x, len: n });
        }
        if is_member[x] {
            continue;
        }
        if members.iter().all(|&m| space.dist(m, x) > radius) {
            is_member[x] = true;
            members.push(x);
        }
    }
    members.sort_unstable();
    Ok(Net { radius, members })
}

/// Nested nets `N_1 ⊇ N_2 ⊇ … ⊇ N_s` at ascending radii `r_1 < … < r_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalNet {
    pub levels: Vec<Net>,
    /// Highest level containing each point, or -1.
    top_level: Vec<i64>,
}

impl HierarchicalNet {
    /// Builds the coarsest level first and seeds each finer level with the
    /// level above it.
    pub fn build(space: &MetricSpace, radii: &[f64]) -> Result<Self> {
        if radii.is_empty()
            || radii[0] <= 0.0
            || radii.windows(2).any(|w| !(w[0] < w[1]))
        {
            return Err(Error::NonAscendingRadii);
        }
        let mut levels: Vec<Net> = Vec::with_capacity(radii.len());
        for &r in radii.iter().rev() {
            let seed = levels.last().map(|net: &Net| net.members.as_slice());
            levels.push(build_net(space, r, seed)?);
        }
        levels.reverse();
        let mut top_level = vec![-1i64; space.len()];
        for (i, net) in levels.iter().enumerate() {
            for &m in &net.members {
                top_level[m] = i as i64;
            }
        }
        Ok(HierarchicalNet { levels, top_level })
    }

    /// Maximal level index whose members contain `x`; -1 if none.
    pub fn net_level(&self, x: usize) -> i64 {
        self.top_level.get(x).copied().unwrap_or(-1)
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

pub fn build_hierarchy(space: &MetricSpace, radii: &[f64]) -> Result<HierarchicalNet> {
    HierarchicalNet::build(space, radii)
}

/// Exhaustive packing and covering check of `net` against `domain`.
pub fn is_valid_net(space: &MetricSpace, domain: &[usize], net: &Net) -> bool {
    let packing = net.members.iter().enumerate().all(|(a, &y)| {
        net.members[a + 1..]
            .iter()
            .all(|&z| space.dist(y, z) > net.radius)
    });
    let covering = domain
        .iter()
        .all(|&x| net.members.iter().any(|&y| space.dist(x, y) <= net.radius));
    packing && covering
}
