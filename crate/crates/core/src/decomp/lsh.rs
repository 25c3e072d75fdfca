//! Locality-sensitive hashing and its reduction to bounded partitions.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{validate_domain, DecompositionScheme, DeltaHint, Partition, PartitionSampler, SchemeParams};
use crate::math;
use crate::{Error, MetricSpace, Result};

/// One hash function drawn from a family.
pub trait PointHash {
    fn bucket(&self, x: &[f64]) -> i64;
}

/// A distribution over hash functions.
pub trait HashFamily {
    type Hash: PointHash;

    fn draw(&self, rng: &mut dyn RngCore) -> Self::Hash;
}

/// `(r, c·r, p1, p2)`: pairs within `near` collide with probability at least
/// `p1`, pairs beyond `far` with probability at most `p2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionModel {
    pub near: f64,
    pub far: f64,
    pub p1: f64,
    pub p2: f64,
}

impl CollisionModel {
    pub fn new(near: f64, far: f64, p1: f64, p2: f64) -> Result<Self> {
        if !(near > 0.0 && far >= near) {
            return Err(Error::invalid("collision radii must satisfy 0 < r <= c·r"));
        }
        if !(p2 > 0.0 && p2 <= p1 && p1 <= 1.0) {
            return Err(Error::invalid("collision probabilities must satisfy 0 < p2 <= p1 <= 1"));
        }
        Ok(CollisionModel { near, far, p1, p2 })
    }

    /// `ρ = ln(1/p1) / ln(1/p2)`; 1 for the degenerate `p2 = 1`.
    pub fn rho(&self) -> f64 {
        if self.p2 >= 1.0 {
            return 1.0;
        }
        math::ln(1.0 / self.p1) / math::ln(1.0 / self.p2)
    }
}

/// A base family together with its collision model and the number `k` of
/// independent base hashes concatenated per drawn function.
#[derive(Debug, Clone, PartialEq)]
pub struct LshFamily<F> {
    pub base: F,
    pub model: CollisionModel,
    pub k: usize,
}

impl<F: HashFamily> LshFamily<F> {
    pub fn new(base: F, model: CollisionModel) -> Self {
        LshFamily { base, model, k: 1 }
    }

    pub fn rho(&self) -> f64 {
        self.model.rho()
    }

    /// `p1^k`.
    pub fn near_bound(&self) -> f64 {
        powi(self.model.p1, self.k)
    }

    /// `p2^k`.
    pub fn far_bound(&self) -> f64 {
        powi(self.model.p2, self.k)
    }

    pub fn draw(&self, rng: &mut dyn RngCore) -> Concatenated<F::Hash> {
        Concatenated {
            parts: (0..self.k).map(|_| self.base.draw(rng)).collect(),
        }
    }
}

/// Concatenation of `k` base hashes.
#[derive(Debug, Clone, PartialEq)]
pub struct Concatenated<H> {
    pub parts: Vec<H>,
}

impl<H: PointHash> Concatenated<H> {
    pub fn key(&self, x: &[f64]) -> Vec<i64> {
        self.parts.iter().map(|h| h.bucket(x)).collect()
    }

    pub fn collide(&self, x: &[f64], y: &[f64]) -> bool {
        self.parts.iter().all(|h| h.bucket(x) == h.bucket(y))
    }
}

fn powi(x: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, _| acc * x)
}

/// Sets `k = ⌈log_{1/p2} n²⌉`, the least `k` with `p2^k <= n^{-2}`.
pub fn lsh_amplify<F: HashFamily>(mut family: LshFamily<F>, n: usize) -> Result<LshFamily<F>> {
    if n < 2 {
        return Err(Error::invalid("amplification needs n >= 2"));
    }
    let p2 = family.model.p2;
    if p2 >= 1.0 {
        return Err(Error::AmplificationImpossible(p2));
    }
    let target = 2.0 * math::ln(n as f64);
    let step = math::ln(1.0 / p2);
    // k·ln(1/p2) >= 2 ln n, with slack so exact powers are not bumped up by rounding
    let mut k = math::ceil(target / step).max(1.0) as usize;
    while k > 1 && ((k - 1) as f64) * step >= target * (1.0 - 1e-12) {
        k -= 1;
    }
    while (k as f64) * step < target * (1.0 - 1e-12) {
        k += 1;
    }
    family.k = k;
    Ok(family)
}

/// Standard symmetric p-stable variate: Gaussian for `p = 2`, Cauchy for
/// `p = 1`, Chambers–Mallows–Stuck in between.
pub fn sample_pstable(p: f64, rng: &mut dyn RngCore) -> f64 {
    if p == 2.0 {
        return StandardNormal.sample(rng);
    }
    let theta = PI * (rng.random::<f64>() - 0.5);
    if p == 1.0 {
        return math::tan(theta);
    }
    let w = -math::ln(1.0 - rng.random::<f64>());
    math::sin(p * theta) / math::powf(math::cos(theta), 1.0 / p)
        * math::powf(math::cos((1.0 - p) * theta) / w, (1.0 - p) / p)
}

/// `h(x) = ⌊(a·x + b) / w⌋` with p-stable `a` and uniform `b ∈ [0, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PStable {
    pub p: f64,
    pub width: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PStableHash {
    a: Vec<f64>,
    b: f64,
    width: f64,
}

impl PointHash for PStableHash {
    fn bucket(&self, x: &[f64]) -> i64 {
        let dot: f64 = self.a.iter().zip(x).map(|(a, x)| a * x).sum();
        math::floor((dot + self.b) / self.width) as i64
    }
}

impl HashFamily for PStable {
    type Hash = PStableHash;

    fn draw(&self, rng: &mut dyn RngCore) -> PStableHash {
        let a = (0..self.dim).map(|_| sample_pstable(self.p, rng)).collect();
        let b = rng.random::<f64>() * self.width;
        PStableHash {
            a,
            b,
            width: self.width,
        }
    }
}

/// Fraction of `draws` hash functions under which `x` and `y` collide.
pub fn empirical_collision_rate<F: HashFamily>(
    family: &F,
    x: &[f64],
    y: &[f64],
    draws: usize,
    rng: &mut dyn RngCore,
) -> f64 {
    let hits = (0..draws)
        .filter(|_| {
            let h = family.draw(rng);
            h.bucket(x) == h.bucket(y)
        })
        .count();
    hits as f64 / draws.max(1) as f64
}

/// p-stable family calibrated by Monte Carlo at distances `near` and
/// `t·near`. The estimates are clamped into `0 < p2 <= p1 <= 1`.
pub fn pstable_hash_family(
    p: f64,
    width: f64,
    dim: usize,
    near: f64,
    t: f64,
    draws: usize,
    rng: &mut dyn RngCore,
) -> Result<LshFamily<PStable>> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::UnsupportedNorm(p));
    }
    if !(width > 0.0) || dim == 0 || draws == 0 {
        return Err(Error::invalid("width, dimension and draws must be positive"));
    }
    let base = PStable { p, width, dim };
    let origin = vec![0.0; dim];
    let at = |dist: f64, rng: &mut dyn RngCore| {
        let mut y = vec![0.0; dim];
        y[0] = dist;
        empirical_collision_rate(&base, &origin, &y, draws, rng)
    };
    let p1 = at(near, rng);
    let p2 = at(t * near, rng);
    let floor = 1.0 / (draws as f64 + 1.0);
    let p2 = p2.clamp(floor, 1.0);
    let p1 = p1.max(p2);
    let model = CollisionModel::new(near, t * near, p1, p2)?;
    Ok(LshFamily::new(base, model))
}

/// Draws one hash from `family`, buckets `domain` by hash key, then evicts
/// (all at once, against the original buckets) every point that has a
/// bucket partner farther than `t·scale`. Evicted points become singletons.
pub fn lsh_to_partition<F: HashFamily>(
    family: &LshFamily<F>,
    space: &MetricSpace,
    domain: &[usize],
    scale: f64,
    t: f64,
    rng: &mut dyn RngCore,
) -> Result<Partition> {
    validate_domain(space, domain, scale)?;
    let points = space.points().ok_or(Error::SchemeMismatch {
        scheme: "lsh",
        backing: space.backing_name(),
    })?;
    let s = space.scale_factor();
    let coords: Vec<f64> = domain
        .iter()
        .flat_map(|&x| points.point(x).iter().map(move |c| c * s))
        .collect();
    let buckets = refine_buckets(&coords, points.dim(), family, rng);
    let bound = t * scale;
    let far = |a: usize, b: usize| space.dist(domain[a], domain[b]) > bound;
    Ok(evict(buckets, domain, far))
}

/// Bucket ids under a fresh concatenated hash of `family`, for the points
/// stored row-major in `coords`. Component hashes are drawn one at a time
/// and drawing stops once every bucket is a singleton, since further
/// components cannot merge buckets again.
fn refine_buckets<F: HashFamily>(
    coords: &[f64],
    dim: usize,
    family: &LshFamily<F>,
    rng: &mut dyn RngCore,
) -> Vec<usize> {
    let m = coords.len() / dim;
    let mut ids = vec![0usize; m];
    let mut next_id = 1;
    let mut active: Vec<usize> = if m > 1 { (0..m).collect() } else { Vec::new() };
    let mut keyed: Vec<(usize, i64, usize)> = Vec::with_capacity(m);
    for _ in 0..family.k {
        if active.is_empty() {
            break;
        }
        let h = family.base.draw(rng);
        keyed.clear();
        keyed.extend(
            active
                .iter()
                .map(|&a| (ids[a], h.bucket(&coords[a * dim..(a + 1) * dim]), a)),
        );
        keyed.sort_unstable();
        active.clear();
        let mut start = 0;
        while start < keyed.len() {
            let key = (keyed[start].0, keyed[start].1);
            let mut end = start + 1;
            while end < keyed.len() && (keyed[end].0, keyed[end].1) == key {
                end += 1;
            }
            for &(_, _, a) in &keyed[start..end] {
                ids[a] = next_id;
                if end - start > 1 {
                    active.push(a);
                }
            }
            next_id += 1;
            start = end;
        }
    }
    ids
}

/// Groups positions by bucket id and turns every point with a `far` bucket
/// partner into a singleton.
fn evict<F>(buckets: Vec<usize>, domain: &[usize], far: F) -> Partition
where
    F: Fn(usize, usize) -> bool,
{
    let m = domain.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_unstable_by_key(|&a| (buckets[a], a));
    let mut evicted = vec![false; m];
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && buckets[order[end]] == buckets[order[start]] {
            end += 1;
        }
        let bucket = &order[start..end];
        for (i, &a) in bucket.iter().enumerate() {
            for &b in &bucket[i + 1..] {
                if far(a, b) {
                    evicted[a] = true;
                    evicted[b] = true;
                }
            }
        }
        start = end;
    }
    let mut labels = buckets;
    let mut next = labels.iter().max().map_or(0, |&x| x + 1);
    for (a, label) in labels.iter_mut().enumerate() {
        if evicted[a] {
            *label = next;
            next += 1;
        }
    }
    Partition::from_labels(domain.to_vec(), labels)
}

/// Decomposition scheme from amplified p-stable LSH. Base hashes use bucket
/// width `width_factor·Δ`; the collision probabilities at `Δ` and `t·Δ`
/// depend only on `width_factor` and are calibrated once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LshScheme {
    t: f64,
    p: f64,
    dim: usize,
    width_factor: f64,
    model: CollisionModel,
}

pub const DEFAULT_WIDTH_FACTOR: f64 = 4.0;
pub const CALIBRATION_DRAWS: usize = 10_000;

impl LshScheme {
    pub fn new(p: f64, dim: usize, t: f64, width_factor: f64, rng: &mut dyn RngCore) -> Result<Self> {
        SchemeParams::new(t, DeltaHint::Adaptive)?;
        let unit = pstable_hash_family(p, width_factor, dim, 1.0, t, CALIBRATION_DRAWS, rng)?;
        Ok(LshScheme {
            t,
            p,
            dim,
            width_factor,
            model: unit.model,
        })
    }

    pub fn with_default_width(p: f64, dim: usize, t: f64, rng: &mut dyn RngCore) -> Result<Self> {
        LshScheme::new(p, dim, t, DEFAULT_WIDTH_FACTOR, rng)
    }

    /// Collision model at unit scale.
    pub fn unit_model(&self) -> CollisionModel {
        self.model
    }

    /// Amplified family for a domain of `n` points at scale `scale`.
    pub fn family(&self, n: usize, scale: f64) -> Result<LshFamily<PStable>> {
        let base = PStable {
            p: self.p,
            width: self.width_factor * scale,
            dim: self.dim,
        };
        let model = CollisionModel {
            near: scale,
            far: self.t * scale,
            ..self.model
        };
        lsh_amplify(LshFamily::new(base, model), n.max(2))
    }
}

struct LshSampler {
    domain: Vec<usize>,
    /// Scaled coordinates of domain points, row-major.
    coords: Vec<f64>,
    dim: usize,
    family: LshFamily<PStable>,
    /// Bit `a·m + b` is set when positions `a` and `b` are farther apart
    /// than `t·Δ`.
    far: Vec<u64>,
}

impl LshSampler {
    fn far_bits(space: &MetricSpace, domain: &[usize], bound: f64) -> Vec<u64> {
        let m = domain.len();
        let mut bits = vec![0u64; (m * m).div_ceil(64)];
        for a in 0..m {
            for b in a + 1..m {
                if space.dist(domain[a], domain[b]) > bound {
                    for k in [a * m + b, b * m + a] {
                        bits[k / 64] |= 1 << (k % 64);
                    }
                }
            }
        }
        bits
    }
}

impl PartitionSampler for LshSampler {
    fn sample(&mut self, rng: &mut dyn RngCore) -> Result<Partition> {
        let buckets = refine_buckets(&self.coords, self.dim, &self.family, rng);
        let m = self.domain.len();
        let far = |a: usize, b: usize| {
            let k = a * m + b;
            self.far[k / 64] >> (k % 64) & 1 == 1
        };
        Ok(evict(buckets, &self.domain, far))
    }
}

impl DecompositionScheme for LshScheme {
    fn name(&self) -> &'static str {
        "lsh-pstable"
    }

    fn params(&self) -> SchemeParams {
        SchemeParams {
            t: self.t,
            delta: DeltaHint::Adaptive,
        }
    }

    fn prepare<'a>(
        &'a self,
        space: &'a MetricSpace,
        domain: &[usize],
        scale: f64,
    ) -> Result<Box<dyn PartitionSampler + 'a>> {
        validate_domain(space, domain, scale)?;
        let points = space.points().ok_or(Error::SchemeMismatch {
            scheme: self.name(),
            backing: space.backing_name(),
        })?;
        if points.dim() != self.dim {
            return Err(Error::invalid("scheme dimension differs from the point set"));
        }
        let s = space.scale_factor();
        let coords = domain
            .iter()
            .flat_map(|&x| points.point(x).iter().map(move |c| c * s))
            .collect();
        Ok(Box::new(LshSampler {
            domain: domain.to_vec(),
            coords,
            dim: self.dim,
            family: self.family(domain.len(), scale)?,
            far: LshSampler::far_bits(space, domain, self.t * scale),
        }))
    }
}
