use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{check_interval, floor_i64, reach, walk_ascending, walk_start, PointSet};
use crate::counter::CounterRng;
use crate::{Error, Result};

/// Mean number of points per cell above which the inversion sampler is
/// refused.
pub const MAX_CELL_MEAN: f64 = 32.0;

/// Cumulative probabilities `P(N <= k)` tabulated for `k < CDF_TABLE`.
const CDF_TABLE: usize = 16;

/// A single realization of a homogeneous Poisson process on the line.
///
/// The line is cut into cells `[c*w, (c+1)*w)`. The number of points in cell
/// `c` and their positions are pure functions of `(seed, c)`: the count comes
/// from the key of stream `c`, the positions from its counters `0..count`.
/// Nothing is cached, so any query order sees the same points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonField {
    intensity: f64,
    seed: u64,
    cell_size: f64,
    inv_cell_size: f64,
    cell_mean: f64,
    cdf: [f64; CDF_TABLE],
    rng: CounterRng,
}

/// Domain tag separating obstacle streams from other uses of a seed.
const OBSTACLE_DOMAIN: u64 = 0x6f62_7374_6163_6c65;

impl PoissonField {
    pub fn new(intensity: f64, seed: u64, cell_size: Option<f64>) -> Result<Self> {
        if !(intensity.is_finite() && intensity > 0.0) {
            return Err(Error::domain("intensity", alloc::format!("must be finite and > 0, got {intensity}")));
        }
        let cell_size = cell_size.unwrap_or(1.0 / intensity);
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(Error::domain("cell_size", alloc::format!("must be finite and > 0, got {cell_size}")));
        }
        let cell_mean = intensity * cell_size;
        if cell_mean > MAX_CELL_MEAN {
            return Err(Error::domain(
                "cell_size",
                alloc::format!("intensity * cell_size = {cell_mean} exceeds {MAX_CELL_MEAN}"),
            ));
        }
        let mut cdf = [0.0; CDF_TABLE];
        let mut p = Float::exp(-cell_mean);
        let mut acc = p;
        for (k, slot) in cdf.iter_mut().enumerate() {
            *slot = acc;
            p *= cell_mean / (k + 1) as f64;
            acc += p;
        }
        Ok(Self {
            intensity,
            seed,
            cell_size,
            inv_cell_size: 1.0 / cell_size,
            cell_mean,
            cdf,
            rng: CounterRng::with_domain(seed, OBSTACLE_DOMAIN),
        })
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    /// Calls `f` for every point of cell `c`, in generation order.
    #[inline]
    pub fn for_each_in_cell(&self, c: i64, mut f: impl FnMut(f64)) {
        let mut stream = self.rng.stream(c as u64);
        let count = self.cell_count(stream.key_uniform());
        let base = c as f64;
        for _ in 0..count {
            f((base + stream.next_uniform()) * self.cell_size);
        }
    }

    fn any_in_cell(&self, c: i64, mut pred: impl FnMut(f64) -> bool) -> bool {
        let mut stream = self.rng.stream(c as u64);
        let count = self.cell_count(stream.key_uniform());
        let base = c as f64;
        (0..count).any(|_| pred((base + stream.next_uniform()) * self.cell_size))
    }

    /// Inverse-cdf Poisson count for uniform `u`.
    #[inline(always)]
    fn cell_count(&self, u: f64) -> u32 {
        match self.cdf.iter().position(|&c| u < c) {
            Some(k) => k as u32,
            None => poisson_inverse(u, self.cell_mean, Float::exp(-self.cell_mean)),
        }
    }

    /// Cells that can hold a point of `[lo, hi]`. A point of cell `c` lies in
    /// `[c*w, (c+1)*w]` (the upper end only through rounding), and the cell
    /// index of an endpoint may itself be off by rounding, so neighbors are
    /// added when an endpoint is within a hair of a cell boundary.
    #[inline]
    fn cell_span(&self, lo: f64, hi: f64) -> (i64, i64) {
        let a = lo * self.inv_cell_size;
        let b = hi * self.inv_cell_size;
        let mut c0 = floor_i64(a);
        let mut c1 = floor_i64(b);
        if a - c0 as f64 <= 1e-9 + a.abs() * 1e-14 {
            c0 -= 1;
        }
        if (c1 + 1) as f64 - b <= 1e-9 + b.abs() * 1e-14 {
            c1 += 1;
        }
        (c0, c1)
    }
}

/// Points of cells `start, start + 1, ...` in non-decreasing order.
struct Ascending<'a> {
    field: &'a PoissonField,
    cell: i64,
    buf: Vec<f64>,
    pos: usize,
}

impl<'a> Ascending<'a> {
    fn new(field: &'a PoissonField, start: i64) -> Self {
        Self {
            field,
            cell: start,
            buf: Vec::with_capacity(8),
            pos: 0,
        }
    }
}

impl Iterator for Ascending<'_> {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        while self.pos == self.buf.len() {
            self.buf.clear();
            self.pos = 0;
            let buf = &mut self.buf;
            self.field.for_each_in_cell(self.cell, |x| buf.push(x));
            if buf.len() > 1 {
                buf.sort_unstable_by(f64::total_cmp);
            }
            self.cell += 1;
        }
        let x = self.buf[self.pos];
        self.pos += 1;
        Some(x)
    }
}

/// Smallest `k` with `P(N <= k) > u` for `N ~ Poisson(mean)`.
#[inline(always)]
fn poisson_inverse(u: f64, mean: f64, empty_prob: f64) -> u32 {
    let mut k = 0u32;
    let mut p = empty_prob;
    let mut cdf = p;
    // The cap only matters when the cdf saturates below u in floating point.
    while u >= cdf && k < 1000 {
        k += 1;
        p *= mean / k as f64;
        cdf += p;
        if p == 0.0 {
            break;
        }
    }
    k
}

impl PointSet for PoissonField {
    fn nearest_distance(&self, y: f64) -> f64 {
        let w = self.cell_size;
        let c = floor_i64(y * self.inv_cell_size);
        let mut best = f64::INFINITY;
        self.for_each_in_cell(c, |x| best = best.min((y - x).abs()));
        let mut r = 1i64;
        loop {
            // Points of cell c - r are <= (c - r + 1) w, points of cell c + r
            // are >= (c + r) w; these bounds only shrink distances.
            let left_bound = (y - (c - r + 1) as f64 * w).max(0.0);
            let right_bound = ((c + r) as f64 * w - y).max(0.0);
            let go_left = left_bound <= best;
            let go_right = right_bound <= best;
            if !go_left && !go_right {
                return best;
            }
            if go_left {
                self.for_each_in_cell(c - r, |x| best = best.min((y - x).abs()));
            }
            if go_right {
                self.for_each_in_cell(c + r, |x| best = best.min((y - x).abs()));
            }
            r += 1;
        }
    }

    #[inline]
    fn hit(&self, y: f64, eps: f64) -> bool {
        let r = reach(y, eps);
        let (c0, c1) = self.cell_span(y - r, y + r);
        (c0..=c1).any(|c| self.any_in_cell(c, |x| (y - x).abs() <= r))
    }

    fn first_hit(&self, q0: f64, v: f64, eps: f64, cap: u64) -> Option<u64> {
        let start = floor_i64(walk_start(q0, v, eps) * self.inv_cell_size) - 1;
        walk_ascending(q0, v, eps, cap, Ascending::new(self, start))
    }

    fn enumerate(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        check_interval(a, b, self.intensity)?;
        let (c0, c1) = self.cell_span(a, b);
        let mut out = Vec::new();
        for c in c0..=c1 {
            self.for_each_in_cell(c, |x| {
                if (a..b).contains(&x) {
                    out.push(x)
                }
            });
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        Ok(out)
    }

    fn density(&self) -> f64 {
        self.intensity
    }

    fn min_gap(&self) -> Option<f64> {
        None
    }
}
