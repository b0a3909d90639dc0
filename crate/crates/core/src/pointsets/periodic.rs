use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{check_interval, floor_i64, reach, walk_ascending, walk_start, PointSet};
use crate::{Error, Result};

/// The lattice `spacing * Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Periodic {
    spacing: f64,
    inv_spacing: f64,
}

impl Periodic {
    pub fn new(spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::domain("spacing", alloc::format!("must be finite and > 0, got {spacing}")));
        }
        Ok(Self {
            spacing,
            inv_spacing: 1.0 / spacing,
        })
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    #[inline(always)]
    fn point(&self, m: i64) -> f64 {
        m as f64 * self.spacing
    }
}

impl PointSet for Periodic {
    fn nearest_distance(&self, y: f64) -> f64 {
        let m = floor_i64(y * self.inv_spacing + 0.5);
        (m - 1..=m + 1)
            .map(|k| (y - self.point(k)).abs())
            .fold(f64::INFINITY, f64::min)
    }

    #[inline]
    fn hit(&self, y: f64, eps: f64) -> bool {
        let r = reach(y, eps);
        let m = floor_i64(y * self.inv_spacing + 0.5);
        if (y - self.point(m)).abs() <= r {
            return true;
        }
        // If m is not the nearest index, the true nearest point is
        // still about half a spacing away.
        if r < 0.25 * self.spacing {
            return false;
        }
        self.nearest_distance(y) <= r
    }

    fn first_hit(&self, q0: f64, v: f64, eps: f64, cap: u64) -> Option<u64> {
        let start = floor_i64(walk_start(q0, v, eps) * self.inv_spacing) - 1;
        walk_ascending(q0, v, eps, cap, (start..).map(|m| self.point(m)))
    }

    fn enumerate(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        check_interval(a, b, 1.0 / self.spacing)?;
        let lo = (a / self.spacing).floor() as i64 - 1;
        let hi = (b / self.spacing).ceil() as i64 + 1;
        Ok((lo..=hi)
            .map(|m| self.point(m))
            .filter(|x| (a..b).contains(x))
            .collect())
    }

    fn density(&self) -> f64 {
        1.0 / self.spacing
    }

    fn min_gap(&self) -> Option<f64> {
        Some(self.spacing)
    }
}
