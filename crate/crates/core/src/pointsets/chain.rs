use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{check_interval, floor_i64, reach, walk_ascending, walk_start, PointSet};
use crate::{Error, Result};

/// Largest `|m|` accepted by the chain formulas. Beyond it `m/nu` loses the
/// absolute accuracy the hit tests rely on.
pub const MAX_INDEX: i64 = 1 << 40;

/// The two-gap chain `x_m = m/nu_s + floor(m/s)/(s*nu_s)` with
/// `nu_s = sqrt(1 + s^2)`.
///
/// Gaps are `1/nu_s` (short) and `(1 + 1/s)/nu_s` (long); the mean gap is
/// `nu_s/s^2`. With `s = tau` this is the golden Fibonacci chain, for which
/// `floor(m/tau)` is evaluated exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Chain {
    slope: f64,
    inv_slope: f64,
    inv_nu: f64,
    inv_slope_nu: f64,
    density: f64,
    golden: bool,
}

impl Chain {
    pub fn new(slope: f64) -> Result<Self> {
        if !(slope.is_finite() && slope > 1.0) {
            return Err(Error::domain("slope", alloc::format!("must be finite and > 1, got {slope}")));
        }
        let nu = Float::sqrt(1.0 + slope * slope);
        let tau = super::golden_constants().tau;
        Ok(Self {
            slope,
            inv_slope: 1.0 / slope,
            inv_nu: 1.0 / nu,
            inv_slope_nu: 1.0 / (slope * nu),
            density: slope * slope / nu,
            golden: slope == tau,
        })
    }

    pub fn fibonacci() -> Self {
        // tau > 1, cannot fail
        Self::new(super::golden_constants().tau).unwrap()
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn short_gap(&self) -> f64 {
        self.inv_nu
    }

    pub fn long_gap(&self) -> f64 {
        self.inv_nu + self.inv_slope_nu
    }

    pub fn mean_gap(&self) -> f64 {
        1.0 / self.density
    }

    /// Position of the `m`-th point.
    pub fn point(&self, m: i64) -> Result<f64> {
        if m.unsigned_abs() > MAX_INDEX as u64 {
            return Err(Error::Range {
                what: "index",
                value: m as f64,
                limit: "|m| <= 2^40".into(),
            });
        }
        Ok(self.point_unchecked(m))
    }

    #[inline(always)]
    pub(crate) fn point_unchecked(&self, m: i64) -> f64 {
        let q = self.floor_ratio(m);
        m as f64 * self.inv_nu + q as f64 * self.inv_slope_nu
    }

    /// `floor(m / slope)`.
    #[inline(always)]
    fn floor_ratio(&self, m: i64) -> i64 {
        let f = m as f64 * self.inv_slope;
        let q = floor_i64(f);
        let frac = f - q as f64;
        // The product carries a relative error of a few ulps; only when it
        // lands that close to an integer can its floor be wrong.
        let tol = f.abs() * 1e-14 + 1e-12;
        if frac > tol && frac < 1.0 - tol {
            q
        } else if self.golden {
            golden_floor_exact(m)
        } else {
            floor_i64(m as f64 / self.slope)
        }
    }

    /// Index bracket for `y`: the nearest point has an index in
    /// `base - 1 ..= base + 3` (see `nearest_distance`).
    #[inline(always)]
    fn base_index(&self, y: f64) -> i64 {
        floor_i64(y * self.density)
    }
}

/// `floor(m / tau)` in integer arithmetic.
///
/// `m / tau = m*tau - m` and `floor(n*tau) = floor((n + isqrt(5 n^2)) / 2)`
/// for `n >= 0`; `n*tau` is never an integer for `n != 0`.
fn golden_floor_exact(m: i64) -> i64 {
    fn floor_n_tau(n: u64) -> u128 {
        let n = n as u128;
        (n + (5 * n * n).isqrt()) / 2
    }
    let n = m.unsigned_abs();
    let down = (floor_n_tau(n) - n as u128) as i64;
    if m >= 0 {
        down
    } else {
        -down - 1
    }
}

impl PointSet for Chain {
    fn nearest_distance(&self, y: f64) -> f64 {
        // x_m - m*mean_gap lies in (-1/(s*nu), 0], so the points bracketing y
        // have indices base or base + 1 (base + 2 for the upper neighbor);
        // the extra margin covers rounding of y * density.
        let base = self.base_index(y);
        (base - 3..=base + 3)
            .map(|m| (y - self.point_unchecked(m)).abs())
            .fold(f64::INFINITY, f64::min)
    }

    #[inline]
    fn hit(&self, y: f64, eps: f64) -> bool {
        let r = reach(y, eps);
        let t = y * self.density;
        let base = floor_i64(t);
        let frac = t - base as f64;
        let tol = 1e-9 + t.abs() * 1e-14;
        if frac < tol || frac > 1.0 - tol {
            // base may be off by one through rounding
            return (base - 1..=base + 3).any(|m| (y - self.point_unchecked(m)).abs() <= r);
        }
        // x_base <= y < x_{base + 2}; the neighbors of y are x_{base + 1}
        // and whichever of x_base, x_{base + 2} lies on the other side.
        let mid = self.point_unchecked(base + 1);
        if (y - mid).abs() <= r {
            return true;
        }
        let other = if mid <= y { base + 2 } else { base };
        (y - self.point_unchecked(other)).abs() <= r
    }

    fn first_hit(&self, q0: f64, v: f64, eps: f64, cap: u64) -> Option<u64> {
        let start = self.base_index(walk_start(q0, v, eps)) - 2;
        walk_ascending(q0, v, eps, cap, (start..).map(|m| self.point_unchecked(m)))
    }

    fn enumerate(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        check_interval(a, b, self.density)?;
        let lo = self.base_index(a) - 2;
        let hi = self.base_index(b) + 3;
        if lo < -MAX_INDEX || hi > MAX_INDEX {
            return Err(Error::Range {
                what: "interval end",
                value: if lo < -MAX_INDEX { a } else { b },
                limit: "chain indices must stay within +-2^40".into(),
            });
        }
        Ok((lo..=hi)
            .map(|m| self.point_unchecked(m))
            .filter(|x| (a..b).contains(x))
            .collect())
    }

    fn density(&self) -> f64 {
        self.density
    }

    fn min_gap(&self) -> Option<f64> {
        Some(self.short_gap())
    }
}

/// `m`-th point of the golden Fibonacci chain.
pub fn fib_point(m: i64) -> Result<f64> {
    Chain::fibonacci().point(m)
}

/// `m`-th point of the two-gap chain with slope `s > 1`.
pub fn chain_point(m: i64, s: f64) -> Result<f64> {
    Chain::new(s)?.point(m)
}
