//! Cut-and-project construction of one-dimensional quasicrystals.
//!
//! A line `E = { x in R^2 : x . omega = 0 }` is swept across the square
//! lattice `Z^2`; lattice points whose orthogonal coordinate `p . omega_hat`
//! falls inside a window are kept and projected onto `E`. With
//! `omega = (-1, tau)` and a window of width `tau^2 / nu` this reproduces the
//! golden Fibonacci chain, which is what [`align_to_chain`] checks.

use alloc::vec::Vec;
use core::ops::Range;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Largest number of lattice columns a single sweep may visit.
pub const MAX_COLUMNS: u64 = 10_000_000;

/// Strip description: normal `omega` of `E` and the accepted interval of
/// orthogonal coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StripSpec {
    pub omega: [f64; 2],
    pub window_lo: f64,
    pub window_hi: f64,
    /// Accept `[lo, hi)` when set, `[lo, hi]` otherwise.
    pub half_open: bool,
}

impl StripSpec {
    pub fn new(omega: [f64; 2], window_lo: f64, window_hi: f64, half_open: bool) -> Result<Self> {
        if !(omega[0].is_finite() && omega[1].is_finite()) || omega[0] == 0.0 || omega[1] == 0.0 {
            return Err(Error::domain("omega", "both components must be finite and nonzero"));
        }
        if !(window_lo < window_hi) {
            return Err(Error::domain("window", alloc::format!("need lo < hi, got [{window_lo}, {window_hi}]")));
        }
        Ok(Self {
            omega,
            window_lo,
            window_hi,
            half_open,
        })
    }

    /// Window `Pi_perp([-1/2, 1/2)^2)` for `omega = (-1, slope)`, half-open.
    pub fn centered(slope: f64) -> Result<Self> {
        let omega = [-1.0, slope];
        let half = 0.5 * cell_width(omega);
        Self::new(omega, -half, half, true)
    }

    /// Window `Pi_perp((-1, 0] x [0, 1))` for `omega = (-1, slope)`: the unit
    /// cell with the origin at a corner, giving `[0, (1 + slope)/nu)`.
    /// At the golden slope this yields exactly the points of `fib_point`.
    pub fn corner(slope: f64) -> Result<Self> {
        let omega = [-1.0, slope];
        Self::new(omega, 0.0, cell_width(omega), true)
    }

    pub fn norm(&self) -> f64 {
        Float::sqrt(self.omega[0] * self.omega[0] + self.omega[1] * self.omega[1])
    }

    /// Orthogonal coordinate `p . omega_hat`.
    #[inline]
    pub fn perp(&self, p: [i64; 2]) -> f64 {
        (self.omega[0] * p[0] as f64 + self.omega[1] * p[1] as f64) / self.norm()
    }

    /// Coordinate along `E`, `p . e_hat` with `e_hat = (omega_2, -omega_1)/|omega|`.
    #[inline]
    pub fn along(&self, p: [i64; 2]) -> f64 {
        (self.omega[1] * p[0] as f64 - self.omega[0] * p[1] as f64) / self.norm()
    }

    /// The same strip with its window moved by `w`.
    pub fn shifted(&self, w: f64) -> Self {
        Self {
            window_lo: self.window_lo + w,
            window_hi: self.window_hi + w,
            ..*self
        }
    }
}

/// Width of the orthogonal projection of a unit lattice cell.
fn cell_width(omega: [f64; 2]) -> f64 {
    (omega[0].abs() + omega[1].abs()) / Float::sqrt(omega[0] * omega[0] + omega[1] * omega[1])
}

/// Whether lattice point `p` lies in the strip.
pub fn strip_accept(p: [i64; 2], spec: &StripSpec) -> bool {
    let t = spec.perp(p);
    if spec.half_open {
        spec.window_lo <= t && t < spec.window_hi
    } else {
        spec.window_lo <= t && t <= spec.window_hi
    }
}

/// Projections onto `E` of the accepted lattice points with first coordinate
/// in `columns`, sorted.
///
/// For each column the admissible second coordinates form an interval, found
/// by solving the window inequality for `p_2` and confirmed with
/// [`strip_accept`].
pub fn cut_project_line(spec: &StripSpec, columns: Range<i64>) -> Result<Vec<f64>> {
    let width = columns.end.saturating_sub(columns.start).max(0) as u64;
    if width > MAX_COLUMNS {
        return Err(Error::Resource(alloc::format!(
            "sweep of {width} columns exceeds {MAX_COLUMNS}"
        )));
    }
    let norm = spec.norm();
    let [w0, w1] = spec.omega;
    let mut out = Vec::new();
    for p1 in columns {
        // (w0 p1 + w1 p2) / norm in [lo, hi]
        let a = (spec.window_lo * norm - w0 * p1 as f64) / w1;
        let b = (spec.window_hi * norm - w0 * p1 as f64) / w1;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        for p2 in lo.floor() as i64 - 1..=hi.ceil() as i64 + 1 {
            if strip_accept([p1, p2], spec) {
                out.push(spec.along([p1, p2]));
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

/// Column range whose accepted points cover `[a, b)` on `E`, with margin.
pub fn columns_covering(spec: &StripSpec, a: f64, b: f64) -> Range<i64> {
    // p . e_hat = (w1 p1 - w0 p2)/norm and p2 ~ -w0 p1 / w1 + O(window), so
    // along ~ p1 (w1 + w0^2/w1)/norm = p1 * norm / w1.
    let norm = spec.norm();
    let rate = norm / spec.omega[1];
    let slack = 2.0 + (spec.window_hi - spec.window_lo).abs() * norm;
    let (ca, cb) = (a / rate, b / rate);
    let (lo, hi) = if ca <= cb { (ca, cb) } else { (cb, ca) };
    (lo - slack).floor() as i64..(hi + slack).ceil() as i64 + 1
}

/// Points of the strip set in `[a, b)`.
pub fn cut_project_interval(spec: &StripSpec, a: f64, b: f64) -> Result<Vec<f64>> {
    if !(a < b) {
        return Err(Error::domain("interval", alloc::format!("need a < b, got [{a}, {b})")));
    }
    let mut pts = cut_project_line(spec, columns_covering(spec, a, b))?;
    pts.retain(|x| (a..b).contains(x));
    Ok(pts)
}

/// Result of aligning a strip sequence with a chain sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alignment {
    /// Index into the chain sequence matching the first strip point.
    pub offset: usize,
    /// Translation added to strip points to land on chain points.
    pub shift: f64,
    /// Largest position mismatch after the shift.
    pub max_error: f64,
}

/// Finds a single translation mapping `strip` onto a consecutive run of
/// `chain`.
///
/// Both inputs are sorted two-gap sequences. Gaps are classified short/long
/// at the midpoint of their observed range and the strip's gap word is
/// located in the chain's gap word; the translation is then fixed by the
/// first point and the residual measured over the whole run. The first
/// occurrence is tried first; later occurrences only if it does not fit
/// within `tol`.
pub fn align_to_chain(strip: &[f64], chain: &[f64], tol: f64) -> Option<Alignment> {
    if strip.len() < 2 || chain.len() < strip.len() {
        return None;
    }
    let classify = |xs: &[f64]| -> Vec<bool> {
        let gaps: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let lo = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mid = 0.5 * (lo + hi);
        gaps.iter().map(|&g| g > mid).collect()
    };
    let sw = classify(strip);
    let cw = classify(chain);
    (0..=cw.len() - sw.len())
        .filter(|&off| cw[off..off + sw.len()] == sw[..])
        .map(|off| {
            let shift = chain[off] - strip[0];
            let max_error = strip
                .iter()
                .zip(&chain[off..])
                .map(|(s, c)| (s + shift - c).abs())
                .fold(0.0, f64::max);
            Alignment {
                offset: off,
                shift,
                max_error,
            }
        })
        .find(|a| a.max_error <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::{golden_constants, Chain};

    #[test]
    fn accept_examples() {
        let g = golden_constants();
        let spec = StripSpec::centered(g.tau).unwrap();
        assert!(strip_accept([0, 0], &spec));
        // (tau - 1)/nu ~ 0.3249 < (1 + tau)/(2 nu) ~ 0.6882
        assert!((spec.perp([1, 1]) - (g.tau - 1.0) / g.nu).abs() < 1e-15);
        assert!((spec.window_hi - (1.0 + g.tau) / (2.0 * g.nu)).abs() < 1e-15);
        assert!(strip_accept([1, 1], &spec));
        assert!((spec.perp([5, 0]) + 5.0 / g.nu).abs() < 1e-14);
        assert!(!strip_accept([5, 0], &spec));
    }

    #[test]
    fn brute_force_acceptance_matches_sweep() {
        let g = golden_constants();
        for spec in [StripSpec::centered(g.tau).unwrap(), StripSpec::corner(2.5).unwrap()] {
            let mut brute: Vec<f64> = (-40..40)
                .flat_map(|p1| (-120..120).map(move |p2| [p1, p2]))
                .filter(|&p| strip_accept(p, &spec))
                .map(|p| spec.along(p))
                .collect();
            brute.sort_by(f64::total_cmp);
            let sweep = cut_project_line(&spec, -40..40).unwrap();
            assert_eq!(brute, sweep);
        }
    }

    #[test]
    #[allow(clippy::reversed_empty_ranges)]
    fn empty_range_and_bad_spec() {
        let spec = StripSpec::centered(1.7).unwrap();
        assert!(cut_project_line(&spec, 5..5).unwrap().is_empty());
        assert!(cut_project_line(&spec, 5..2).unwrap().is_empty());
        assert!(StripSpec::new([0.0, 1.0], -1.0, 1.0, true).is_err());
        assert!(StripSpec::new([-1.0, 1.5], 1.0, 1.0, true).is_err());
        assert!(matches!(cut_project_line(&spec, 0..20_000_000), Err(Error::Resource(_))));
    }

    #[test]
    fn corner_window_reproduces_fibonacci_points() {
        let g = golden_constants();
        let spec = StripSpec::corner(g.tau).unwrap();
        let chain = Chain::fibonacci();
        let pts = cut_project_interval(&spec, -100.0, 100.0).unwrap();
        let first = pts.iter().position(|&x| x == 0.0 || x.abs() < 1e-12).unwrap();
        // x_0 = 0 is the projection of the origin; index the rest from it
        for (k, x) in pts.iter().enumerate() {
            let m = k as i64 - first as i64;
            assert!((x - chain.point(m).unwrap()).abs() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn centered_window_aligns_after_index_shift() {
        let g = golden_constants();
        let strip = cut_project_line(&StripSpec::centered(g.tau).unwrap(), 0..1300).unwrap();
        let chain: Vec<f64> = (-5000..5000).map(|m| Chain::fibonacci().point(m).unwrap()).collect();
        let a = align_to_chain(&strip[100..2100], &chain, 1e-9).expect("alignment");
        assert!(a.max_error <= 1e-9);
        // Pinning the origin of both sequences together does not work for
        // this window: the two point sets differ near 0.
        let origin = strip.iter().position(|&x| x == 0.0).unwrap();
        let naive = strip[origin..origin + 50]
            .iter()
            .zip(&chain[5000..])
            .map(|(s, c)| (s - c).abs())
            .fold(0.0, f64::max);
        assert!(naive > 0.1, "{naive}");
    }

    #[test]
    fn rational_slope_is_periodic() {
        let spec = StripSpec::centered(2.0).unwrap();
        let pts = cut_project_interval(&spec, 0.0, 60.0).unwrap();
        let gaps: Vec<f64> = pts.windows(2).map(|w| w[1] - w[0]).collect();
        // perp in {-1, 0, 1}/sqrt5: three points per period sqrt5
        let period = 3;
        for i in 0..gaps.len() - period {
            assert!((gaps[i] - gaps[i + period]).abs() < 1e-12);
        }
        let s5 = 5f64.sqrt();
        assert!(((pts[period] - pts[0]) - s5).abs() < 1e-12);
    }

    #[test]
    fn discreteness_and_relative_density() {
        for s in [golden_constants().tau, 2f64.sqrt(), core::f64::consts::FRAC_PI_2] {
            let spec = StripSpec::centered(s).unwrap();
            let pts = cut_project_line(&spec, 0..70_000).unwrap();
            assert!(pts.len() >= 100_000, "{}", pts.len());
            let nu = (1.0 + s * s).sqrt();
            let gaps = pts[..100_000].windows(2).map(|w| w[1] - w[0]);
            let (lo, hi) = gaps.fold((f64::INFINITY, 0.0f64), |(a, b), g| (a.min(g), b.max(g)));
            assert!(lo >= 0.9 / nu, "s={s}: min gap {lo}");
            assert!(hi <= 1.1 * (1.0 + 1.0 / s) / nu, "s={s}: max gap {hi}");
        }
    }

    #[test]
    fn two_gaps_for_general_slope() {
        let s = 2.5;
        let nu = (1.0f64 + s * s).sqrt();
        let pts = cut_project_line(&StripSpec::centered(s).unwrap(), 0..20_000).unwrap();
        for w in pts.windows(2) {
            let g = w[1] - w[0];
            assert!((g - 1.0 / nu).abs() < 1e-9 || (g - s / nu).abs() < 1e-9, "gap {g}");
        }
    }

    #[test]
    fn window_shift_by_lattice_perp_translates() {
        let g = golden_constants();
        let spec = StripSpec::centered(g.tau).unwrap();
        let q = [3i64, 2i64];
        let moved = spec.shifted(spec.perp(q));
        let a = cut_project_line(&spec, 0..3000).unwrap();
        let b = cut_project_line(&moved, q[0]..3000 + q[0]).unwrap();
        assert_eq!(a.len(), b.len());
        let shift = spec.along(q);
        for (x, y) in a.iter().zip(&b) {
            assert!((x + shift - y).abs() < 1e-9);
        }
    }
}
