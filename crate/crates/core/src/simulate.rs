//! Seeded Monte Carlo trajectories on density matrices.
//!
//! Trial `i` draws from its own ChaCha8 stream seeded with `seed ^ i`, so a
//! trial's outcome does not depend on how many trials run or in what order.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::graph::StateGraph;
use crate::measurement::{apply_measurement, MeasurementSet};
use crate::policy::{Policy, PolicyKind};
use crate::state::{DensityMatrix, Target};

/// Name of the generator behind every trial stream.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), seed_from_u64(seed ^ trial)";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryStep {
    pub action: usize,
    pub outcome: usize,
    /// Graph id of the post-measurement state, when it is in the graph.
    pub state: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// Seed of this trial's stream.
    pub seed: u64,
    pub steps: Vec<TrajectoryStep>,
    pub arrived: bool,
    /// First step at which the state equals the target; present iff `arrived`.
    pub arrival_step: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SimulationSummary {
    pub trials: usize,
    pub arrivals: usize,
    pub success_rate: f64,
    /// Binomial standard error `sqrt(p (1 - p) / trials)`.
    pub success_stderr: f64,
    /// Mean arrival step over trials that arrived.
    pub mean_arrival: Option<f64>,
    /// Standard error of `mean_arrival`.
    pub arrival_stderr: Option<f64>,
    pub records: Vec<TrajectoryRecord>,
}

impl SimulationSummary {
    pub fn non_arrivals(&self) -> usize {
        self.trials - self.arrivals
    }
}

pub fn substream_seed(seed: u64, trial: u64) -> u64 {
    seed ^ trial
}

/// Uniform draw in `[0, 1)` from the top 53 bits.
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Runs one trajectory.
///
/// Policies with a horizon run exactly that many measurements and arrive iff
/// the final state is the target. Stationary policies stop on the first visit
/// to the target, at a state without a decision, or after `max_steps`.
pub fn run_trial(
    policy: &Policy,
    graph: &StateGraph,
    set: &MeasurementSet,
    rho0: &DensityMatrix,
    target: &Target,
    trial_seed: u64,
    max_steps: usize,
) -> Result<TrajectoryRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let needs_id = policy.kind() != PolicyKind::DeterministicSequence;
    let locate = |rho: &DensityMatrix| -> Result<Option<usize>> {
        match graph.find(rho) {
            Some(id) => Ok(Some(id)),
            None if needs_id => Err(Error::StateNotInGraph),
            None => Ok(None),
        }
    };

    let mut rho = rho0.clone();
    let mut id = locate(&rho)?;
    let mut first_hit = target.matches(&rho).then_some(0);
    let mut steps = Vec::new();
    let limit = policy.horizon();

    for step in 0.. {
        match limit {
            Some(n) if step >= n => break,
            None if first_hit.is_some() || step >= max_steps => break,
            _ => {}
        }
        let Some(action) = policy.action(step, id.unwrap_or(usize::MAX)) else {
            if limit.is_some() {
                return Err(Error::MissingDecision {
                    step,
                    state: id.unwrap_or(usize::MAX),
                });
            }
            break;
        };
        let branches = apply_measurement(&rho, set.action(action)?)?;
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        let u = uniform(&mut rng) * total;
        let mut acc = 0.0;
        let mut pick = branches.len() - 1;
        for (i, b) in branches.iter().enumerate() {
            acc += b.probability;
            if u < acc {
                pick = i;
                break;
            }
        }
        let branch = branches.into_iter().nth(pick).expect("at least one branch survives");
        rho = branch.state;
        id = locate(&rho)?;
        steps.push(TrajectoryStep {
            action,
            outcome: branch.outcome,
            state: id,
        });
        if first_hit.is_none() && target.matches(&rho) {
            first_hit = Some(step + 1);
        }
    }

    let arrived = match limit {
        Some(_) => target.matches(&rho),
        None => first_hit.is_some(),
    };
    Ok(TrajectoryRecord {
        seed: trial_seed,
        steps,
        arrived,
        arrival_step: if arrived { first_hit } else { None },
    })
}

/// Runs `trials` independent trajectories sequentially.
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    policy: &Policy,
    graph: &StateGraph,
    set: &MeasurementSet,
    rho0: &DensityMatrix,
    target: &Target,
    trials: usize,
    seed: u64,
    max_steps: usize,
) -> Result<SimulationSummary> {
    let records = (0..trials as u64)
        .map(|i| run_trial(policy, graph, set, rho0, target, substream_seed(seed, i), max_steps))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(records))
}

/// Aggregates trial records (in trial order) into rates and standard errors.
pub fn summarize(records: Vec<TrajectoryRecord>) -> SimulationSummary {
    let trials = records.len();
    let arrivals = records.iter().filter(|r| r.arrived).count();
    let p = if trials == 0 {
        0.0
    } else {
        arrivals as f64 / trials as f64
    };
    let success_stderr = if trials == 0 {
        0.0
    } else {
        libm::sqrt(p * (1.0 - p) / trials as f64)
    };

    let times: Vec<f64> = records
        .iter()
        .filter_map(|r| r.arrival_step.map(|s| s as f64))
        .collect();
    let (mean_arrival, arrival_stderr) = if times.is_empty() {
        (None, None)
    } else {
        let m = times.len() as f64;
        let mean = times.iter().sum::<f64>() / m;
        let var = if times.len() > 1 {
            times.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (m - 1.0)
        } else {
            0.0
        };
        (Some(mean), Some(libm::sqrt(var / m)))
    };

    SimulationSummary {
        trials,
        arrivals,
        success_rate: p,
        success_stderr,
        mean_arrival,
        arrival_stderr,
        records,
    }
}
