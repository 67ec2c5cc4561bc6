//! Worker pool and multi-threaded Monte Carlo.

use qsteer_core::simulate::{run_trial, substream_seed, summarize};
use qsteer_core::{DensityMatrix, MeasurementSet, Policy, SimulationSummary, StateGraph, Target};
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "QSTEER_THREADS";

/// Builds a pool sized by `QSTEER_THREADS` (rayon's default when unset or `0`).
pub fn worker_pool() -> Result<ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`")))?,
        Err(_) => 0,
    };
    Ok(ThreadPoolBuilder::new().num_threads(threads).build()?)
}

/// Same trials as [`qsteer_core::simulate`], run on `pool`. Each trial owns
/// its random stream, so the summary does not depend on the schedule.
#[allow(clippy::too_many_arguments)]
pub fn simulate_parallel(
    pool: &ThreadPool,
    policy: &Policy,
    graph: &StateGraph,
    set: &MeasurementSet,
    rho0: &DensityMatrix,
    target: &Target,
    trials: usize,
    seed: u64,
    max_steps: usize,
) -> Result<SimulationSummary> {
    let records = pool.install(|| {
        (0..trials as u64)
            .into_par_iter()
            .map(|i| run_trial(policy, graph, set, rho0, target, substream_seed(seed, i), max_steps))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(summarize(records))
}
