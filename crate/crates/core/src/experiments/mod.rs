//! Experiments: figure traces, minimal-time scaling sweeps and the
//! optimality bound check.

mod optimality;
mod scaling;
mod traces;

pub use optimality::{
    optimality_check, optimality_check_with, OptimalityReport, PairMode, ALL_PAIRS_MAX_SIZE,
    DEFAULT_EPS_DIST, OPTIMALITY_MAX_SIZE,
};
pub use scaling::{
    fit_power_law, minimal_time, minimal_time_with, scaling_sweep, scaling_sweep_with,
    success_at, EngineChoice, PowerLawFit, ScalingPoint, ScalingReport, SearchOptions,
    AUTO_FULL_ENGINE_MAX, MIN_SWEEP_SIZES,
};
pub use traces::{
    linear_comparison_trace, sample_schedule, schedule_trace, spectrum_trace, ScheduleRow,
};

use rayon::prelude::*;

/// Maps `f` over `items` on a pool of at most `jobs` workers (all cores when
/// `None`). Output order follows input order regardless of completion order.
pub fn parallel_map<T, R, F>(items: &[T], jobs: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    with_jobs(jobs, || items.par_iter().map(&f).collect())
}

/// Runs `f` with rayon work capped at `jobs` threads (all cores when `None`).
pub fn with_jobs<R, F>(jobs: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match jobs.map(|j| rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build()) {
        Some(Ok(pool)) => pool.install(f),
        _ => f(),
    }
}
