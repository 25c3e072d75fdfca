//! Float helpers for `no_std` builds, backed by `libm`.

use core::cmp::Ordering;

/// Relative tolerance used wherever two computed reals are compared for equality.
pub const REL_TOL: f64 = 1e-9;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn tan(x: f64) -> f64 {
    libm::tan(x)
}

/// `a <= b` up to [`REL_TOL`] relative slack.
#[inline]
pub fn le_rel(a: f64, b: f64) -> bool {
    a <= b + REL_TOL * b.abs()
}

/// Total order over `f64` for heaps and sorts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ordf(pub f64);

impl Eq for Ordf {}

impl PartialOrd for Ordf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordf {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}
