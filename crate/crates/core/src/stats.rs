//! Survival curves of scaled free paths and tail fits.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::simulate::StepHistogram;
use crate::{Error, Result};

/// Number of thresholds on the default grid.
pub const DEFAULT_GRID_POINTS: usize = 64;
pub const DEFAULT_GRID_T_MIN: f64 = 0.05;
/// The default grid ends at this fraction of the censor limit.
pub const DEFAULT_GRID_TOP: f64 = 0.8;
pub const MIN_FIT_POINTS: usize = 5;

/// Empirical `P(eps * k >= T)` on a grid of thresholds.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SurvivalCurve {
    pub thresholds: Vec<f64>,
    pub survival: Vec<f64>,
    /// Numerators of `survival`; empty for synthetic curves.
    pub counts_ge: Vec<u64>,
    /// Sample count (0 for synthetic curves).
    pub n: u64,
    pub epsilon: f64,
    pub field_tag: String,
    /// `eps * max_steps`; estimates are exact up to here.
    pub censor_limit: f64,
}

impl SurvivalCurve {
    /// A noiseless curve from known values, for fits and comparisons.
    pub fn synthetic(thresholds: Vec<f64>, survival: Vec<f64>, tag: &str) -> Result<Self> {
        if thresholds.len() != survival.len() {
            return Err(Error::domain("survival", "length differs from thresholds"));
        }
        check_grid(&thresholds)?;
        Ok(Self {
            thresholds,
            survival,
            counts_ge: Vec::new(),
            n: 0,
            epsilon: f64::NAN,
            field_tag: tag.to_string(),
            censor_limit: f64::INFINITY,
        })
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    /// Binomial standard error of `survival[i]`.
    pub fn standard_error(&self, i: usize) -> f64 {
        let p = self.survival[i];
        Float::sqrt(p * (1.0 - p) / self.n as f64)
    }

    /// Checks the curve invariants.
    pub fn validate(&self) -> Result<()> {
        check_grid(&self.thresholds)?;
        if self.survival.len() != self.thresholds.len() {
            return Err(Error::domain("survival", "length differs from thresholds"));
        }
        if self.survival.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(Error::domain("survival", "values must lie in [0, 1]"));
        }
        if self.survival.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::domain("survival", "must be non-increasing"));
        }
        if let Some(&t) = self.thresholds.last() {
            if t > self.censor_limit {
                return Err(Error::Range {
                    what: "threshold",
                    value: t,
                    limit: alloc::format!("<= censor limit {}", self.censor_limit),
                });
            }
        }
        Ok(())
    }
}

fn check_grid(thresholds: &[f64]) -> Result<()> {
    if thresholds.iter().any(|t| !t.is_finite()) {
        return Err(Error::domain("thresholds", "must be finite"));
    }
    if thresholds.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("thresholds", "must be strictly increasing"));
    }
    Ok(())
}

/// `survival(T) = (#{hits with eps*k >= T} + #censored) / N`.
///
/// A censored trajectory has `k > cap`, so it survives every `T <= eps*cap`;
/// thresholds beyond that are rejected.
pub fn survival_from_steps(
    hist: &StepHistogram,
    epsilon: f64,
    thresholds: &[f64],
    field_tag: &str,
) -> Result<SurvivalCurve> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::domain("epsilon", alloc::format!("must be > 0, got {epsilon}")));
    }
    check_grid(thresholds)?;
    let n = hist.n();
    if n == 0 {
        return Err(Error::domain("histogram", "no outcomes"));
    }
    let censor_limit = epsilon * hist.cap() as f64;
    if let Some(&t) = thresholds.iter().find(|&&t| t > censor_limit) {
        return Err(Error::Range {
            what: "threshold T",
            value: t,
            limit: alloc::format!("<= eps * cap = {censor_limit}"),
        });
    }
    let hits: Vec<(u64, u64)> = hist.hits().collect();
    // tail[i] = number of hits with step index >= hits[i].0
    let mut tail = alloc::vec![0u64; hits.len() + 1];
    for i in (0..hits.len()).rev() {
        tail[i] = tail[i + 1] + hits[i].1;
    }
    let counts_ge: Vec<u64> = thresholds
        .iter()
        .map(|&t| {
            let first = hits.partition_point(|&(k, _)| (k as f64) * epsilon < t);
            tail[first] + hist.censored()
        })
        .collect();
    let survival = counts_ge.iter().map(|&c| c as f64 / n as f64).collect();
    Ok(SurvivalCurve {
        thresholds: thresholds.to_vec(),
        survival,
        counts_ge,
        n,
        epsilon,
        field_tag: field_tag.to_string(),
        censor_limit,
    })
}

/// `count` log-uniformly spaced values from `t_min` to `t_max` inclusive.
pub fn default_thresholds(t_min: f64, t_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(t_min.is_finite() && t_max.is_finite() && t_min > 0.0 && t_min < t_max) {
        return Err(Error::domain("threshold range", alloc::format!("need 0 < T_min < T_max, got [{t_min}, {t_max}]")));
    }
    if count < 2 {
        return Err(Error::domain("count", alloc::format!("need at least 2, got {count}")));
    }
    let ratio = t_max / t_min;
    let last = (count - 1) as f64;
    let mut grid: Vec<f64> = (0..count)
        .map(|i| t_min * Float::powf(ratio, i as f64 / last))
        .collect();
    grid[0] = t_min;
    grid[count - 1] = t_max;
    check_grid(&grid)?;
    Ok(grid)
}

/// The standard grid for a run with the given censor limit: 64 points from
/// 0.05 to `0.8 * censor_limit`.
pub fn default_grid(censor_limit: f64) -> Result<Vec<f64>> {
    default_thresholds(DEFAULT_GRID_T_MIN, DEFAULT_GRID_TOP * censor_limit, DEFAULT_GRID_POINTS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TailModel {
    /// `survival ~ prefactor * T^param`
    PowerLaw,
    /// `survival ~ prefactor * exp(-param * T)`
    Exponential,
}

impl TailModel {
    pub fn name(&self) -> &'static str {
        match self {
            TailModel::PowerLaw => "power_law",
            TailModel::Exponential => "exponential",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TailFit {
    pub model: TailModel,
    /// Exponent (power law, negative for decay) or rate (exponential).
    pub param: f64,
    pub prefactor: f64,
    pub fit_range: [f64; 2],
    /// RMS residual in the transformed coordinates of the fit.
    pub rms_residual: f64,
    pub points_used: usize,
    /// In-range thresholds skipped because their survival is zero.
    pub zeros_dropped: usize,
}

/// Least squares of `ln S` on `ln T` over thresholds in `range`.
pub fn fit_power_tail(curve: &SurvivalCurve, range: [f64; 2]) -> Result<TailFit> {
    fit_tail(curve, range, TailModel::PowerLaw)
}

/// Least squares of `ln S` on `T` over thresholds in `range`; rate = -slope.
pub fn fit_exponential_tail(curve: &SurvivalCurve, range: [f64; 2]) -> Result<TailFit> {
    fit_tail(curve, range, TailModel::Exponential)
}

fn fit_tail(curve: &SurvivalCurve, range: [f64; 2], model: TailModel) -> Result<TailFit> {
    let [lo, hi] = range;
    if !(lo < hi) {
        return Err(Error::domain("fit range", alloc::format!("need T_lo < T_hi, got [{lo}, {hi}]")));
    }
    if hi > curve.censor_limit {
        return Err(Error::Range {
            what: "fit range end",
            value: hi,
            limit: alloc::format!("<= censor limit {}", curve.censor_limit),
        });
    }
    if model == TailModel::PowerLaw && lo <= 0.0 {
        return Err(Error::domain("fit range", "power-law fits need T_lo > 0"));
    }
    let mut zeros = 0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &s) in curve.thresholds.iter().zip(&curve.survival) {
        if t < lo || t > hi {
            continue;
        }
        if s <= 0.0 {
            zeros += 1;
            continue;
        }
        xs.push(match model {
            TailModel::PowerLaw => Float::ln(t),
            TailModel::Exponential => t,
        });
        ys.push(Float::ln(s));
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            usable: xs.len(),
            needed: MIN_FIT_POINTS,
        });
    }
    let (slope, intercept, rms) = least_squares(&xs, &ys);
    Ok(TailFit {
        model,
        param: match model {
            TailModel::PowerLaw => slope,
            TailModel::Exponential => -slope,
        },
        prefactor: Float::exp(intercept),
        fit_range: range,
        rms_residual: rms,
        points_used: xs.len(),
        zeros_dropped: zeros,
    })
}

/// Ordinary least squares line; returns `(slope, intercept, rms residual)`.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    (slope, intercept, Float::sqrt(ss / n))
}

/// Largest `|S1(T) - S2(T)|` over the shared thresholds `T >= t_min`.
pub fn curve_sup_distance(c1: &SurvivalCurve, c2: &SurvivalCurve, t_min: f64) -> Result<f64> {
    let tail = |c: &SurvivalCurve| -> (usize, usize) {
        let start = c.thresholds.partition_point(|&t| t < t_min);
        (start, c.thresholds.len() - start)
    };
    let (s1, n1) = tail(c1);
    let (s2, n2) = tail(c2);
    if n1 == 0 || n1 != n2 || c1.thresholds[s1..] != c2.thresholds[s2..] {
        return Err(Error::GridMismatch(alloc::format!(
            "curves '{}' and '{}' do not share thresholds above T = {t_min}",
            c1.field_tag, c2.field_tag
        )));
    }
    Ok(c1.survival[s1..]
        .iter()
        .zip(&c2.survival[s2..])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
