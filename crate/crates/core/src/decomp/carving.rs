//! Ball carving for Euclidean point sets.
//!
//! The process draws centers uniformly from a box that contains every point
//! with margin `t·r`; each center claims the still-unassigned points within
//! `t·r/2`. Centers that claim nothing leave the state unchanged, so the
//! sampler below draws only the centers that land in the union `U` of the
//! balls `B(y, t·r/2)` around unassigned points `y`:
//!
//! 1. pick an unassigned `x` uniformly and a point `s` uniformly in `B(x, t·r/2)`;
//! 2. accept `s` only if no unassigned point of smaller index than `x` has
//!    `s` in its ball.
//!
//! Every `s` in `U` is proposed with density proportional to the number of
//! balls containing it and accepted through exactly one of them, so
//! accepted centers are uniform on `U`, which is exactly the law of the next
//! claiming center of the box process, so the partitions have the same
//! distribution while high-dimensional inputs no longer waste almost every
//! draw on empty space.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};

use super::{validate_domain, DecompositionScheme, DeltaHint, Partition, PartitionSampler, SchemeParams};
use crate::math;
use crate::{Error, MetricSpace, Result};

/// Upper bound on center proposals per partition.
pub const MAX_CENTER_DRAWS: u64 = 1_000_000;

/// Writes a uniform point of the `d`-ball of `radius` around `center` into `out`.
pub fn uniform_in_ball(center: &[f64], radius: f64, rng: &mut dyn RngCore, out: &mut [f64]) {
    let d = center.len();
    let mut norm2 = 0.0;
    for o in out.iter_mut() {
        let g: f64 = StandardNormal.sample(rng);
        *o = g;
        norm2 += g * g;
    }
    if norm2 == 0.0 {
        out.copy_from_slice(center);
        return;
    }
    let r = radius * math::powf(rng.random::<f64>(), 1.0 / d as f64) / math::sqrt(norm2);
    for (o, c) in out.iter_mut().zip(center) {
        *o = c + *o * r;
    }
}

/// Monte-Carlo estimate of `C_d(u, r) / V_d(r)`: the share of the ball of
/// radius `r` around the origin that also lies within `r` of `u·e_1`.
/// Exact at `u = 0` (1) and `u >= 2r` (0).
pub fn cap_ratio_mc(d: usize, u: f64, r: f64, samples: usize, rng: &mut dyn RngCore) -> Result<f64> {
    if d == 0 || !(r > 0.0) || !(u >= 0.0) {
        return Err(Error::invalid("need d >= 1, r > 0, u >= 0"));
    }
    if samples < 1000 {
        return Err(Error::invalid("at least 1000 samples are required"));
    }
    if u == 0.0 {
        return Ok(1.0);
    }
    if u >= 2.0 * r {
        return Ok(0.0);
    }
    let origin = vec![0.0; d];
    let mut z = vec![0.0; d];
    let mut hits = 0usize;
    for _ in 0..samples {
        uniform_in_ball(&origin, r, rng, &mut z);
        let dist2: f64 = z
            .iter()
            .enumerate()
            .map(|(k, &c)| if k == 0 { (c - u) * (c - u) } else { c * c })
            .sum();
        if dist2 <= r * r {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

struct CarvingSampler {
    domain: Vec<usize>,
    coords: Vec<f64>,
    dim: usize,
    radius: f64,
    /// Positions within `2·radius` of each position with their distances,
    /// itself excluded, in ascending order.
    near: Vec<Vec<(u32, f64)>>,
}

impl CarvingSampler {
    fn new(space: &MetricSpace, domain: &[usize], r: f64, t: f64) -> Result<CarvingSampler> {
        let points = match space.points() {
            Some(p) if p.p() == 2.0 => p,
            _ => {
                return Err(Error::SchemeMismatch {
                    scheme: "ball-carving",
                    backing: space.backing_name(),
                })
            }
        };
        if !(t >= 2.0) {
            return Err(Error::invalid("ball carving needs t >= 2"));
        }
        let s = space.scale_factor();
        let dim = points.dim();
        let coords: Vec<f64> = domain
            .iter()
            .flat_map(|&x| points.point(x).iter().map(move |c| c * s))
            .collect();
        let radius = t * r / 2.0;
        let reach = 2.0 * radius * (1.0 + 1e-9);
        let m = domain.len();
        let mut near = vec![Vec::new(); m];
        for a in 0..m {
            for b in a + 1..m {
                let d = space.dist(domain[a], domain[b]);
                if d <= reach {
                    near[a].push((b as u32, d));
                    near[b].push((a as u32, d));
                }
            }
        }
        Ok(CarvingSampler {
            domain: domain.to_vec(),
            coords,
            dim,
            radius,
            near,
        })
    }

    fn point(&self, a: usize) -> &[f64] {
        &self.coords[a * self.dim..(a + 1) * self.dim]
    }

    fn dist2(&self, a: usize, s: &[f64]) -> f64 {
        let p = self.point(a);
        let mut acc = [0.0; 4];
        let mut pc = p.chunks_exact(4);
        let mut sc = s.chunks_exact(4);
        for (x, y) in (&mut pc).zip(&mut sc) {
            for k in 0..4 {
                let d = x[k] - y[k];
                acc[k] += d * d;
            }
        }
        let tail: f64 = pc.remainder().iter().zip(sc.remainder()).map(|(x, y)| (x - y) * (x - y)).sum();
        (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
    }

    /// Whether the ball around position `b`, at distance `dxb` from the
    /// proposing point, contains `s`, which lies at distance `rho` from it.
    fn covers(&self, b: usize, dxb: f64, rho: f64, s: &[f64]) -> bool {
        // |d(x,b) - rho| <= d(b,s) <= d(x,b) + rho, with slack for rounding
        if dxb - rho > self.radius * (1.0 + 1e-9) {
            return false;
        }
        dxb + rho < self.radius * (1.0 - 1e-9) || self.dist2(b, s) <= self.radius * self.radius
    }

    fn carve(&self, rng: &mut dyn RngCore) -> Result<Partition> {
        let m = self.domain.len();
        // pool[..live] holds unassigned positions; slot[a] is a's index in pool
        let mut pool: Vec<usize> = (0..m).collect();
        let mut slot: Vec<usize> = (0..m).collect();
        let mut live = m;
        let mut labels = vec![usize::MAX; m];
        let mut center = vec![0.0; self.dim];
        let mut claimed: Vec<usize> = Vec::new();
        let mut cluster = 0;
        let mut draws = 0u64;
        while live > 0 {
            draws += 1;
            if draws > MAX_CENTER_DRAWS {
                return Err(Error::CarvingCapExceeded(MAX_CENTER_DRAWS));
            }
            let x = pool[rng.random_range(0..live)];
            uniform_in_ball(self.point(x), self.radius, rng, &mut center);
            let rho = math::sqrt(self.dist2(x, &center));
            let near = &self.near[x];
            let split = near.partition_point(|&(b, _)| (b as usize) < x);
            let owned_lower = near[..split].iter().any(|&(b, dxb)| {
                let b = b as usize;
                labels[b] == usize::MAX && self.covers(b, dxb, rho, &center)
            });
            if owned_lower {
                continue;
            }
            claimed.clear();
            claimed.push(x);
            for &(b, dxb) in &near[split..] {
                let b = b as usize;
                if labels[b] == usize::MAX && self.covers(b, dxb, rho, &center) {
                    claimed.push(b);
                }
            }
            for &a in &claimed {
                labels[a] = cluster;
                let k = slot[a];
                live -= 1;
                let last = pool[live];
                pool.swap(k, live);
                slot[last] = k;
                slot[a] = live;
            }
            cluster += 1;
        }
        Ok(Partition::from_labels(self.domain.clone(), labels))
    }
}

/// One ball-carving partition of `domain` with balls of radius `t·r/2`.
pub fn ball_carving(
    space: &MetricSpace,
    domain: &[usize],
    r: f64,
    t: f64,
    rng: &mut dyn RngCore,
) -> Result<Partition> {
    validate_domain(space, domain, r)?;
    CarvingSampler::new(space, domain, r, t)?.carve(rng)
}

/// Ball carving as a decomposition scheme on Euclidean point sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallCarving {
    t: f64,
    delta: DeltaHint,
}

impl BallCarving {
    pub fn new(t: f64, delta: DeltaHint) -> Result<Self> {
        SchemeParams::new(t, delta)?;
        if !(t >= 2.0) {
            return Err(Error::invalid("ball carving needs t >= 2"));
        }
        Ok(BallCarving { t, delta })
    }

    /// δ set to the co-clustering lower bound `C_d(1, t/2) / (2·V_d(t/2))`
    /// for pairs at distance `Δ`, estimated with `samples` Monte-Carlo draws.
    pub fn calibrated(dim: usize, t: f64, samples: usize, rng: &mut dyn RngCore) -> Result<Self> {
        let ratio = cap_ratio_mc(dim, 1.0, t / 2.0, samples, rng)?;
        let delta = (ratio / 2.0).max(1.0 / samples as f64);
        BallCarving::new(t, DeltaHint::Numeric(delta))
    }
}

struct Prepared {
    inner: CarvingSampler,
}

impl PartitionSampler for Prepared {
    fn sample(&mut self, rng: &mut dyn RngCore) -> Result<Partition> {
        self.inner.carve(rng)
    }
}

impl DecompositionScheme for BallCarving {
    fn name(&self) -> &'static str {
        "ball-carving"
    }

    fn params(&self) -> SchemeParams {
        SchemeParams {
            t: self.t,
            delta: self.delta,
        }
    }

    fn prepare<'a>(
        &'a self,
        space: &'a MetricSpace,
        domain: &[usize],
        scale: f64,
    ) -> Result<Box<dyn PartitionSampler + 'a>> {
        validate_domain(space, domain, scale)?;
        Ok(Box::new(Prepared {
            inner: CarvingSampler::new(space, domain, scale, self.t)?,
        }))
    }
}
