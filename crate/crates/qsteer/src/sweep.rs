//! Parameter sweeps over horizon and set size.

use qsteer_core::{
    build_standard_set, enumerate_closed, evaluate_policy_exact, make_naive_policy, solve_max_success,
    solve_min_arrival, ArrivalOptions, DensityMatrix, Target,
};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::Result;
use crate::report::{ArrivalRow, FeedbackGainRow, SetSizeRow};

/// Naive and optimal success for `T = N` over `horizons`.
pub fn feedback_gain(
    pool: &ThreadPool,
    horizons: &[usize],
    initial: &DensityMatrix,
    target: &Target,
) -> Result<Vec<FeedbackGainRow>> {
    pool.install(|| {
        horizons
            .par_iter()
            .map(|&n| {
                let set = build_standard_set(n)?;
                let graph = enumerate_closed(initial, &set)?;
                let naive = evaluate_policy_exact(&make_naive_policy(&set, n)?, &graph, graph.initial_id(), target)?;
                let best = solve_max_success(&graph, &set, n, target)?;
                let optimal = best
                    .values()
                    .expect("solver attaches values")
                    .value(n, graph.initial_id());
                Ok(FeedbackGainRow {
                    n,
                    t: n,
                    naive: naive.success_probability,
                    optimal,
                })
            })
            .collect()
    })
}

/// Optimal success for every set size in `sizes` and horizon in `horizons`.
/// One backward pass per size to the largest horizon yields all the values.
pub fn set_size(
    pool: &ThreadPool,
    sizes: &[usize],
    horizons: &[usize],
    initial: &DensityMatrix,
    target: &Target,
) -> Result<Vec<SetSizeRow>> {
    let longest = horizons.iter().copied().max().unwrap_or(0);
    let per_size: Vec<Vec<SetSizeRow>> = pool.install(|| {
        sizes
            .par_iter()
            .map(|&t| {
                let set = build_standard_set(t)?;
                let graph = enumerate_closed(initial, &set)?;
                let best = solve_max_success(&graph, &set, longest, target)?;
                let values = best.values().expect("solver attaches values");
                Ok(horizons
                    .iter()
                    .map(|&n| SetSizeRow {
                        t,
                        n,
                        optimal: values.value(n, graph.initial_id()),
                    })
                    .collect())
            })
            .collect::<Result<_>>()
    })?;
    Ok(per_size.into_iter().flatten().collect())
}

/// Minimal expected arrival time for every set size in `sizes`.
pub fn arrival(
    pool: &ThreadPool,
    sizes: &[usize],
    initial: &DensityMatrix,
    target: &Target,
) -> Result<Vec<ArrivalRow>> {
    pool.install(|| {
        sizes
            .par_iter()
            .map(|&t| {
                let set = build_standard_set(t)?;
                let graph = enumerate_closed(initial, &set)?;
                let best = solve_min_arrival(&graph, &set, target, ArrivalOptions::default())?;
                Ok(ArrivalRow {
                    t,
                    expected_arrival: best
                        .values()
                        .expect("solver attaches values")
                        .value(0, graph.initial_id()),
                })
            })
            .collect()
    })
}
