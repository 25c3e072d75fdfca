use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use super::{validate_domain, DecompositionScheme, DeltaHint, Partition, PartitionSampler, SchemeParams};
use crate::nets::build_net_on;
use crate::{Error, MetricSpace, Result};

/// Random-radius balls around a fixed net, for arbitrary metrics.
///
/// Centers form a `(t-2)·Δ/4`-net of the domain (the whole domain when
/// `t = 2`). Each sample gives every center a radius uniform in
/// `[max(t·Δ/4, Δ), t·Δ/2]` and a random priority; a point joins the
/// highest-priority center whose ball contains it.
///
/// Radii never drop below the net radius, so every point is assigned, and
/// never exceed `t·Δ/2`, so clusters have diameter at most `t·Δ`. A pair
/// within `Δ` fits in the ball of a center near one of its ends with
/// probability at least `(t-2)/t`, or always when `t = 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomShift {
    t: f64,
}

impl RandomShift {
    pub fn new(t: f64) -> Result<Self> {
        SchemeParams::new(t, DeltaHint::Adaptive)?;
        if !(t >= 2.0) {
            return Err(Error::invalid("random shift needs t >= 2"));
        }
        Ok(RandomShift { t })
    }
}

struct ShiftSampler {
    domain: Vec<usize>,
    centers: usize,
    /// Per domain position: `(center id, distance)` for centers within `t·Δ/2`.
    reach: Vec<Vec<(u32, f64)>>,
    lo: f64,
    hi: f64,
}

impl ShiftSampler {
    fn new(space: &MetricSpace, domain: &[usize], scale: f64, t: f64) -> Result<Self> {
        let hi = t * scale / 2.0;
        let lo = (t * scale / 4.0).max(scale).min(hi);
        let net_radius = (t - 2.0) * scale / 4.0;
        let centers = if net_radius > 0.0 {
            build_net_on(space, domain, net_radius, None)?.members
        } else {
            domain.to_vec()
        };
        let reach = domain
            .iter()
            .map(|&x| {
                centers
                    .iter()
                    .enumerate()
                    .filter_map(|(c, &y)| {
                        let d = space.dist(x, y);
                        (d <= hi).then_some((c as u32, d))
                    })
                    .collect()
            })
            .collect();
        Ok(ShiftSampler {
            domain: domain.to_vec(),
            centers: centers.len(),
            reach,
            lo,
            hi,
        })
    }
}

impl PartitionSampler for ShiftSampler {
    fn sample(&mut self, rng: &mut dyn RngCore) -> Result<Partition> {
        let radii: Vec<f64> = (0..self.centers)
            .map(|_| self.lo + (self.hi - self.lo) * rng.random::<f64>())
            .collect();
        let mut order: Vec<usize> = (0..self.centers).collect();
        order.shuffle(rng);
        let mut rank = vec![0usize; self.centers];
        for (r, &c) in order.iter().enumerate() {
            rank[c] = r;
        }
        let labels = self
            .reach
            .iter()
            .map(|cands| {
                cands
                    .iter()
                    .filter(|&&(c, d)| d <= radii[c as usize])
                    .map(|&(c, _)| c as usize)
                    .min_by_key(|&c| rank[c])
                    .expect("the covering center always contains the point")
            })
            .collect();
        Ok(Partition::from_labels(self.domain.clone(), labels))
    }
}

/// One random-shift partition of `domain` at scale `scale`.
pub fn random_shift_net_partition(
    space: &MetricSpace,
    domain: &[usize],
    scale: f64,
    t: f64,
    rng: &mut dyn RngCore,
) -> Result<Partition> {
    RandomShift::new(t)?.sample_partition(space, domain, scale, rng)
}

impl DecompositionScheme for RandomShift {
    fn name(&self) -> &'static str {
        "random-shift"
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
        Ok(Box::new(ShiftSampler::new(space, domain, scale, self.t)?))
    }
}
