//! Trajectories of the discrete free-path map.
//!
//! A trajectory starts at `q0` and visits `q0 + j*v` for `j = 1, 2, ...`; it
//! ends at the first visited position within `eps/2` of a scatterer. All
//! randomness is counter-based: trajectory `i` of a run draws its `(q0, v)`
//! from `(seed, i)` alone, so batches are reproducible under any schedule.

use alloc::collections::BTreeMap;
use core::ops::Range;

#[allow(unused_imports)]
use num_traits::Float;

use crate::counter::CounterRng;
use crate::pointsets::{golden_constants, Chain, PointSet, ScattererField};
use crate::{Error, Result};

/// Default horizon in scaled time; the default step cap is `ceil(T_MAX/eps)`.
pub const DEFAULT_T_MAX: f64 = 50.0;
/// Default length of the initial-position interval, in lattice spacings.
pub const DEFAULT_Q0_SPACINGS: f64 = 1e4;
pub const MAX_TRAJECTORIES: u64 = 1 << 36;
pub const MAX_STEP_CAP: u64 = 1 << 40;

const TRAJECTORY_DOMAIN: u64 = 0x7472_616a_6563_7473;

/// Full description of one experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    /// Obstacle width; a hit is a landing within `epsilon/2` of a scatterer.
    pub epsilon: f64,
    pub n_trajectories: u64,
    /// `q0` is uniform on `[0, q0_span)`.
    pub q0_span: f64,
    /// `v` is uniform on `(0, v_max]`.
    pub v_max: f64,
    pub seed: u64,
    /// Trajectories that have not hit after this many steps are censored.
    pub max_steps: u64,
}

impl SimConfig {
    /// Configuration with the standard sampling intervals for fields of
    /// density `tau^2/nu`: `q0_span = 10^4 nu/tau^2`, `v_max = nu/tau^2`,
    /// `max_steps = ceil(50/eps)`.
    pub fn new(epsilon: f64, n_trajectories: u64, seed: u64) -> Result<Self> {
        let spacing = golden_constants().spacing;
        let cfg = Self {
            epsilon,
            n_trajectories,
            q0_span: DEFAULT_Q0_SPACINGS * spacing,
            v_max: spacing,
            seed,
            max_steps: Self::default_max_steps(epsilon)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn default_max_steps(epsilon: f64) -> Result<u64> {
        check_epsilon(epsilon)?;
        let steps = (DEFAULT_T_MAX / epsilon).ceil();
        if steps > MAX_STEP_CAP as f64 {
            return Err(Error::Resource(alloc::format!(
                "epsilon = {epsilon} needs {steps:e} steps, limit is 2^40"
            )));
        }
        Ok(steps as u64)
    }

    pub fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon)?;
        if self.n_trajectories == 0 {
            return Err(Error::domain("n_trajectories", "must be at least 1"));
        }
        if self.n_trajectories > MAX_TRAJECTORIES {
            return Err(Error::Resource(alloc::format!(
                "{} trajectories exceed the limit of 2^36",
                self.n_trajectories
            )));
        }
        if !(self.q0_span.is_finite() && self.q0_span > 0.0) {
            return Err(Error::domain("q0_span", alloc::format!("must be > 0, got {}", self.q0_span)));
        }
        if !(self.v_max.is_finite() && self.v_max > 0.0) {
            return Err(Error::domain("v_max", alloc::format!("must be > 0, got {}", self.v_max)));
        }
        if self.max_steps == 0 {
            return Err(Error::domain("max_steps", "must be at least 1"));
        }
        if self.max_steps > MAX_STEP_CAP {
            return Err(Error::Resource(alloc::format!("max_steps = {} exceeds 2^40", self.max_steps)));
        }
        Ok(())
    }

    /// Largest scaled time for which survival estimates are exact.
    pub fn censor_limit(&self) -> f64 {
        self.epsilon * self.max_steps as f64
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::domain("epsilon", alloc::format!("must be finite and > 0, got {epsilon}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TrajectoryOutcome {
    /// Absorbed at step `k >= 1`.
    Hit(u64),
    /// No hit within the cap.
    Censored(u64),
}

impl TrajectoryOutcome {
    pub fn steps(&self) -> u64 {
        match *self {
            TrajectoryOutcome::Hit(k) | TrajectoryOutcome::Censored(k) => k,
        }
    }

    pub fn is_hit(&self) -> bool {
        matches!(self, TrajectoryOutcome::Hit(_))
    }
}

/// First step `j` in `1..=cap` landing within `eps/2` of a point of `set`,
/// testing every position independently.
#[inline]
pub fn free_path_steps_in<P: PointSet + ?Sized>(q0: f64, v: f64, set: &P, eps: f64, cap: u64) -> TrajectoryOutcome {
    for j in 1..=cap {
        if set.hit(q0 + j as f64 * v, eps) {
            return TrajectoryOutcome::Hit(j);
        }
    }
    TrajectoryOutcome::Censored(cap)
}

/// Same result as [`free_path_steps_in`], using the set's ascending walk.
#[inline]
pub fn walk_free_path<P: PointSet + ?Sized>(q0: f64, v: f64, set: &P, eps: f64, cap: u64) -> TrajectoryOutcome {
    match set.first_hit(q0, v, eps, cap) {
        Some(j) => TrajectoryOutcome::Hit(j),
        None => TrajectoryOutcome::Censored(cap),
    }
}

/// Number of jumps of length `v` from `q0` until the particle lands within
/// `eps/2` of a scatterer, or `Censored(cap)`.
pub fn free_path_steps(q0: f64, v: f64, field: &ScattererField, eps: f64, cap: u64) -> Result<TrajectoryOutcome> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::domain("v", alloc::format!("jump length must be > 0, got {v}")));
    }
    check_epsilon(eps)?;
    if cap == 0 {
        return Err(Error::domain("cap", "must be at least 1"));
    }
    if !q0.is_finite() {
        return Err(Error::domain("q0", "must be finite"));
    }
    Ok(match field {
        ScattererField::Fibonacci => walk_free_path(q0, v, &Chain::fibonacci(), eps, cap),
        ScattererField::Chain(c) => walk_free_path(q0, v, c, eps, cap),
        ScattererField::Periodic(p) => walk_free_path(q0, v, p, eps, cap),
        ScattererField::Poisson(p) => walk_free_path(q0, v, p, eps, cap),
    })
}

/// Outcome of a trajectory through the two-dimensional periodic channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelOutcome {
    /// Hit after `steps` crossings; `time = sqrt(eps) * steps / cos(theta)`.
    Hit { steps: u64, time: f64 },
    Censored { cap: u64 },
}

/// Free path in the square-lattice Lorentz gas reduced to its crossing map:
/// successive crossings of the horizontal lattice lines are `tan(theta)`
/// apart, and the particle is stopped at the first crossing within
/// `sqrt(eps)/2` of an integer.
pub fn channel_free_path_2d(q0: f64, theta: f64, eps: f64, cap: u64) -> Result<ChannelOutcome> {
    if !(0.0..=core::f64::consts::FRAC_PI_4).contains(&theta) {
        return Err(Error::domain("theta", alloc::format!("must lie in [0, pi/4], got {theta}")));
    }
    check_epsilon(eps)?;
    let width = Float::sqrt(eps);
    let lattice = crate::pointsets::Periodic::new(1.0)?;
    let v = Float::tan(theta);
    let outcome = if v == 0.0 {
        // vertical flight: every crossing is at q0
        if lattice.hit(q0, width) {
            TrajectoryOutcome::Hit(1)
        } else {
            TrajectoryOutcome::Censored(cap)
        }
    } else {
        free_path_steps(q0, v, &ScattererField::Periodic(lattice), width, cap)?
    };
    Ok(match outcome {
        TrajectoryOutcome::Hit(k) => ChannelOutcome::Hit {
            steps: k,
            time: width * k as f64 / Float::cos(theta),
        },
        TrajectoryOutcome::Censored(cap) => ChannelOutcome::Censored { cap },
    })
}

/// The `(q0, v)` pair of trajectory `i`.
pub fn sample_trajectory_params(config: &SimConfig, i: u64) -> Result<(f64, f64)> {
    if i >= config.n_trajectories {
        return Err(Error::Range {
            what: "trajectory index",
            value: i as f64,
            limit: alloc::format!("< {}", config.n_trajectories),
        });
    }
    Ok(TrajectorySampler::new(config).params(i))
}

/// Draws `(q0, v)` for trajectory indices of one configuration.
#[derive(Debug, Clone, Copy)]
pub struct TrajectorySampler {
    rng: CounterRng,
    q0_span: f64,
    v_max: f64,
}

impl TrajectorySampler {
    pub fn new(config: &SimConfig) -> Self {
        Self {
            rng: CounterRng::with_domain(config.seed, TRAJECTORY_DOMAIN),
            q0_span: config.q0_span,
            v_max: config.v_max,
        }
    }

    #[inline]
    pub fn params(&self, i: u64) -> (f64, f64) {
        let mut s = self.rng.stream(i);
        let q0 = s.next_uniform() * self.q0_span;
        // 1 - u lies in (0, 1]
        let v = (1.0 - s.next_uniform()) * self.v_max;
        (q0, v)
    }
}

/// Exact counts of outcomes: hits per step count plus the censored total.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepHistogram {
    hits: BTreeMap<u64, u64>,
    censored: u64,
    cap: u64,
}

impl StepHistogram {
    pub fn new(cap: u64) -> Self {
        Self {
            hits: BTreeMap::new(),
            censored: 0,
            cap,
        }
    }

    pub fn from_outcomes(cap: u64, outcomes: impl IntoIterator<Item = TrajectoryOutcome>) -> Self {
        let mut h = Self::new(cap);
        outcomes.into_iter().for_each(|o| h.record(o));
        h
    }

    #[inline]
    pub fn record(&mut self, outcome: TrajectoryOutcome) {
        match outcome {
            TrajectoryOutcome::Hit(k) => {
                debug_assert!(k >= 1 && k <= self.cap);
                *self.hits.entry(k).or_insert(0) += 1;
            }
            TrajectoryOutcome::Censored(_) => self.censored += 1,
        }
    }

    /// Adds the counts of `other`; caps must agree.
    pub fn merge(&mut self, other: &StepHistogram) {
        assert_eq!(self.cap, other.cap, "merging histograms with different caps");
        for (&k, &c) in &other.hits {
            *self.hits.entry(k).or_insert(0) += c;
        }
        self.censored += other.censored;
    }

    pub fn n(&self) -> u64 {
        self.censored + self.hits.values().sum::<u64>()
    }

    pub fn censored(&self) -> u64 {
        self.censored
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// `(k, count)` pairs in increasing `k`.
    pub fn hits(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.hits.iter().map(|(&k, &c)| (k, c))
    }

    pub fn hit_count(&self, k: u64) -> u64 {
        self.hits.get(&k).copied().unwrap_or(0)
    }
}

/// Runs the trajectories with indices in `range` and counts their outcomes.
pub fn run_range(config: &SimConfig, field: &ScattererField, range: Range<u64>) -> StepHistogram {
    fn go<P: PointSet + ?Sized>(config: &SimConfig, set: &P, range: Range<u64>) -> StepHistogram {
        let sampler = TrajectorySampler::new(config);
        let mut h = StepHistogram::new(config.max_steps);
        for i in range {
            let (q0, v) = sampler.params(i);
            h.record(walk_free_path(q0, v, set, config.epsilon, config.max_steps));
        }
        h
    }
    match field {
        ScattererField::Fibonacci => go(config, &Chain::fibonacci(), range),
        ScattererField::Chain(c) => go(config, c, range),
        ScattererField::Periodic(p) => go(config, p, range),
        ScattererField::Poisson(p) => go(config, p, range),
    }
}

/// Single-threaded batch over all `n_trajectories`.
pub fn run_batch_serial(config: &SimConfig, field: &ScattererField) -> Result<StepHistogram> {
    config.validate()?;
    Ok(run_range(config, field, 0..config.n_trajectories))
}

/// Outcome of trajectory `i` alone.
pub fn simulate_trajectory(config: &SimConfig, field: &ScattererField, i: u64) -> Result<TrajectoryOutcome> {
    let (q0, v) = sample_trajectory_params(config, i)?;
    free_path_steps(q0, v, field, config.epsilon, config.max_steps)
}
