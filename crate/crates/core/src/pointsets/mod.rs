//! Scatterer fields on the real line and their point queries.
//!
//! Every field is an immutable description. Queries (`nearest_distance`,
//! hit tests, enumeration) are pure functions of the field and the query
//! point and cost O(1) for the chains and the lattice. For the Poisson field
//! they cost O(1) expected.

mod chain;
mod periodic;
mod poisson;

use alloc::vec::Vec;

use crate::{Error, Result};
pub use chain::{chain_point, fib_point, Chain, MAX_INDEX};
pub use periodic::Periodic;
pub use poisson::PoissonField;

#[allow(unused_imports)]
use num_traits::Float;

/// Largest number of points a single enumeration may return.
pub const MAX_ENUMERATION: f64 = 1e8;

/// Slack, in units of the float resolution of the query position, added to
/// the `eps/2` reach of a hit test. It absorbs the rounding of `q0 + j*v` so
/// that positions exactly `eps/2` from a scatterer in real arithmetic count
/// as hits.
pub const HIT_SLACK_ULPS: f64 = 4.0;

/// The constants of the golden Fibonacci chain and of the fields matched to it.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GoldenConstants {
    /// `(1 + sqrt 5) / 2`
    pub tau: f64,
    /// `sqrt(1 + tau^2)`, the length of the strip normal `(-1, tau)`.
    pub nu: f64,
    /// Points per unit length, `tau^2 / nu`.
    pub alpha: f64,
    /// Spacing of the periodic lattice with the same density, `nu / tau^2`.
    pub spacing: f64,
}

pub fn golden_constants() -> GoldenConstants {
    let sqrt5 = Float::sqrt(5.0_f64);
    let tau = (1.0 + sqrt5) / 2.0;
    let nu = Float::sqrt(1.0 + tau * tau);
    let tau_sq = tau * tau;
    GoldenConstants {
        tau,
        nu,
        alpha: tau_sq / nu,
        spacing: nu / tau_sq,
    }
}

/// Read-only queries shared by all point sets.
pub trait PointSet {
    /// Exact distance from `y` to the closest point of the set.
    fn nearest_distance(&self, y: f64) -> f64;

    /// `true` iff some point lies within `eps/2` of `y` (inclusive, see
    /// [`reach`]).
    #[inline]
    fn hit(&self, y: f64, eps: f64) -> bool {
        self.nearest_distance(y) <= reach(y, eps)
    }

    /// First step `j` in `1..=cap` with `hit(q0 + j*v, eps)`, for `v > 0`.
    ///
    /// Implementations may walk the points in ascending order instead of
    /// re-locating each position, but must agree with the stepwise test
    /// exactly.
    fn first_hit(&self, q0: f64, v: f64, eps: f64, cap: u64) -> Option<u64> {
        (1..=cap).find(|&j| self.hit(q0 + j as f64 * v, eps))
    }

    /// All points in `[a, b)`, strictly increasing.
    fn enumerate(&self, a: f64, b: f64) -> Result<Vec<f64>>;

    /// Asymptotic number of points per unit length.
    fn density(&self) -> f64;

    /// Shortest distance between two points, if the set has one.
    fn min_gap(&self) -> Option<f64>;
}

/// Walks `y_j = q0 + j*v` (`v > 0`) against `points`, which must list, in
/// non-decreasing order, every point at or above some position not greater
/// than `y_1 - reach(y_1)`. The nearest point to `y_j` is the last listed
/// point `<= y_j` or the first one above it, which makes the result equal
/// to the stepwise nearest-distance test.
#[inline(always)]
pub(crate) fn walk_ascending(q0: f64, v: f64, eps: f64, cap: u64, mut points: impl Iterator<Item = f64>) -> Option<u64> {
    let mut prev = f64::NEG_INFINITY;
    let mut next = points.next().unwrap_or(f64::INFINITY);
    for j in 1..=cap {
        let y = q0 + j as f64 * v;
        while next <= y {
            prev = next;
            next = points.next().unwrap_or(f64::INFINITY);
        }
        let r = reach(y, eps);
        if y - prev <= r || next - y <= r {
            return Some(j);
        }
    }
    None
}

/// Lowest position a walk from `q0` with step `v` must cover.
#[inline(always)]
pub(crate) fn walk_start(q0: f64, v: f64, eps: f64) -> f64 {
    let y1 = q0 + v;
    q0.min(y1 - reach(y1, eps))
}

/// `floor(x)` for `|x| < 2^63` without a libm call.
#[inline(always)]
pub(crate) fn floor_i64(x: f64) -> i64 {
    let t = x as i64;
    t - ((t as f64) > x) as i64
}

/// Distance within which a query at `y` counts as a hit for width `eps`.
#[inline(always)]
pub fn reach(y: f64, eps: f64) -> f64 {
    0.5 * eps + HIT_SLACK_ULPS * f64::EPSILON * y.abs()
}

/// The scatterer geometries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScattererField {
    /// The golden Fibonacci chain `x_m = m/nu + floor(m/tau)/(tau*nu)`.
    Fibonacci,
    /// Two-gap chain with a general slope `s > 1`.
    Chain(Chain),
    Periodic(Periodic),
    /// One fixed, lazily realized Poisson point process.
    Poisson(PoissonField),
}

/// Counts hit queries issued with obstacles wide enough to overlap.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HitDiagnostics {
    pub queries: u64,
    pub overlapping: u64,
}

impl ScattererField {
    pub fn chain(slope: f64) -> Result<Self> {
        Chain::new(slope).map(ScattererField::Chain)
    }

    pub fn periodic(spacing: f64) -> Result<Self> {
        Periodic::new(spacing).map(ScattererField::Periodic)
    }

    /// Poisson field; `cell_size` defaults to `1 / intensity`.
    pub fn poisson(intensity: f64, seed: u64, cell_size: Option<f64>) -> Result<Self> {
        PoissonField::new(intensity, seed, cell_size).map(ScattererField::Poisson)
    }

    /// Short label used in file names and summaries.
    pub fn tag(&self) -> &'static str {
        match self {
            ScattererField::Fibonacci => "fibonacci",
            ScattererField::Chain(_) => "chain",
            ScattererField::Periodic(_) => "periodic",
            ScattererField::Poisson(_) => "poisson",
        }
    }

    /// Applies `f` to the concrete point set behind this field.
    #[inline]
    pub fn with_point_set<R>(&self, f: impl FnOnce(&dyn PointSet) -> R) -> R {
        match self {
            ScattererField::Fibonacci => f(&Chain::fibonacci()),
            ScattererField::Chain(c) => f(c),
            ScattererField::Periodic(p) => f(p),
            ScattererField::Poisson(p) => f(p),
        }
    }

    pub fn nearest_distance(&self, y: f64) -> f64 {
        self.with_point_set(|s| s.nearest_distance(y))
    }

    pub fn field_hit(&self, y: f64, eps: f64) -> bool {
        self.with_point_set(|s| s.hit(y, eps))
    }

    /// Like [`field_hit`](Self::field_hit), recording queries whose width
    /// reaches the shortest gap of the field.
    pub fn field_hit_diag(&self, y: f64, eps: f64, diag: &mut HitDiagnostics) -> bool {
        diag.queries += 1;
        if self.overlapping(eps) {
            diag.overlapping += 1;
        }
        self.field_hit(y, eps)
    }

    /// Whether obstacles of width `eps` can overlap. Poisson points have no
    /// minimum gap; overlap there is intrinsic and not flagged.
    pub fn overlapping(&self, eps: f64) -> bool {
        self.min_gap().is_some_and(|g| eps >= g)
    }

    pub fn enumerate_points(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        self.with_point_set(|s| s.enumerate(a, b))
    }

    pub fn density(&self) -> f64 {
        self.with_point_set(|s| s.density())
    }

    pub fn min_gap(&self) -> Option<f64> {
        self.with_point_set(|s| s.min_gap())
    }

    /// Mean distance between neighboring points.
    pub fn mean_gap(&self) -> f64 {
        1.0 / self.density()
    }
}

pub fn field_hit(field: &ScattererField, y: f64, eps: f64) -> bool {
    field.field_hit(y, eps)
}

pub fn nearest_distance(field: &ScattererField, y: f64) -> f64 {
    field.nearest_distance(y)
}

pub fn enumerate_points(field: &ScattererField, a: f64, b: f64) -> Result<Vec<f64>> {
    field.enumerate_points(a, b)
}

pub(crate) fn check_interval(a: f64, b: f64, density: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::domain("interval", alloc::format!("need a < b, got [{a}, {b})")));
    }
    let expected = (b - a) * density;
    if expected > MAX_ENUMERATION {
        return Err(Error::Resource(alloc::format!(
            "interval [{a}, {b}) holds about {expected:.3e} points, limit is {MAX_ENUMERATION:e}"
        )));
    }
    Ok(())
}
