//! Multi-threaded batches. Trajectories are split into fixed chunks whose
//! histograms are merged by exact count addition, so the result does not
//! depend on the number of threads or on scheduling.

use quasilorentz_core::simulate::run_range;
use quasilorentz_core::{ScattererField, SimConfig, StepHistogram};
use rayon::prelude::*;

use crate::{AppError, AppResult};

/// Trajectories per work item.
pub const CHUNK: u64 = 4096;

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Runs all `config.n_trajectories` trajectories on `threads` workers
/// (default: available parallelism).
pub fn run_batch(config: &SimConfig, field: &ScattererField, threads: Option<usize>) -> AppResult<StepHistogram> {
    config.validate()?;
    let threads = threads.unwrap_or_else(default_threads);
    if threads == 0 {
        return Err(AppError::Config("invalid --threads: must be at least 1".into()));
    }
    let n = config.n_trajectories;
    if threads == 1 {
        return Ok(run_range(config, field, 0..n));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| AppError::Resource(format!("cannot start {threads} worker threads: {e}")))?;
    let chunks = n.div_ceil(CHUNK);
    let cap = config.max_steps;
    let hist = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| run_range(config, field, c * CHUNK..((c + 1) * CHUNK).min(n)))
            .reduce(
                || StepHistogram::new(cap),
                |mut a, b| {
                    a.merge(&b);
                    a
                },
            )
    });
    Ok(hist)
}
