//! Dynamic-programming solvers on a [`StateGraph`].
//!
//! * [`solve_max_success`]: maximize `P(rho_N = target)` by backward induction.
//! * [`solve_max_fidelity`]: maximize `E[<t|rho_N|t>]` by backward induction.
//! * [`solve_min_arrival`]: minimize the expected first-arrival time by value
//!   iteration on the stochastic-shortest-path formulation.
//!
//! All solvers break ties towards the lowest action index: among actions whose
//! value is within [`TIE_TOL`] of the optimum, the first is chosen.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::StateGraph;
use crate::measurement::MeasurementSet;
use crate::policy::{Policy, ValueTable};
use crate::state::Target;

pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalOptions {
    pub max_iters: usize,
    /// Stop once the sup-norm change of a sweep is at most this.
    pub tol: f64,
    /// States whose expected arrival time exceeds this are reported improper.
    pub value_cap: f64,
}

impl Default for ArrivalOptions {
    fn default() -> Self {
        Self {
            max_iters: 100_000,
            tol: 1e-12,
            value_cap: 1e6,
        }
    }
}

/// Result of [`solve_min_arrival_traced`].
#[derive(Debug, Clone)]
pub struct ArrivalSolution {
    pub policy: Policy,
    /// Sup-norm change of each value-iteration sweep.
    pub residuals: Vec<f64>,
}

/// Optimal probability of being exactly on the target after `horizon` measurements.
///
/// The returned policy is Markov; its value table holds `V(t, x)` for every
/// `t <= horizon`, so `values().value(horizon, initial)` is the optimum.
pub fn solve_max_success(graph: &StateGraph, set: &MeasurementSet, horizon: usize, target: &Target) -> Result<Policy> {
    let terminal = graph
        .target_mask(target)
        .into_iter()
        .map(|hit| if hit { 1.0 } else { 0.0 })
        .collect();
    backward_induction(graph, set, horizon, terminal)
}

/// Optimal expected squared overlap `<t|rho_N|t>` with the (pure) target.
pub fn solve_max_fidelity(graph: &StateGraph, set: &MeasurementSet, horizon: usize, target: &Target) -> Result<Policy> {
    let terminal = graph.states().iter().map(|s| target.overlap(s)).collect();
    backward_induction(graph, set, horizon, terminal)
}

fn check_actions(graph: &StateGraph, set: &MeasurementSet) -> Result<()> {
    if graph.action_count() != set.len() {
        return Err(Error::ActionCountMismatch {
            graph: graph.action_count(),
            set: set.len(),
        });
    }
    Ok(())
}

/// `sum_y P(y | a, s) v(next)` for every action, `NaN` where a successor value is undefined.
fn action_values(graph: &StateGraph, state: usize, v: &[f64]) -> Option<Vec<f64>> {
    (0..graph.action_count())
        .map(|a| {
            graph
                .transitions(state, a)
                .map(|ts| ts.iter().map(|t| t.probability * v[t.next]).sum())
        })
        .collect()
}

fn argbest(q: &[f64], maximize: bool) -> Option<usize> {
    let best = if maximize {
        q.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        q.iter().copied().fold(f64::INFINITY, f64::min)
    };
    if !best.is_finite() {
        return None;
    }
    q.iter().position(|&x| {
        if maximize {
            x >= best - TIE_TOL
        } else {
            x <= best + TIE_TOL
        }
    })
}

fn backward_induction(graph: &StateGraph, set: &MeasurementSet, horizon: usize, terminal: Vec<f64>) -> Result<Policy> {
    check_actions(graph, set)?;
    if let Some(depth) = graph.horizon() {
        if depth < horizon {
            return Err(Error::HorizonTooShort { depth, horizon });
        }
    }
    let n = graph.len();
    let mut values = Vec::with_capacity(horizon + 1);
    values.push(terminal);
    // by_steps_to_go[t - 1] holds the decisions with t steps remaining.
    let mut by_steps_to_go = Vec::with_capacity(horizon);

    for t in 1..=horizon {
        let prev = &values[t - 1];
        let mut row = vec![f64::NAN; n];
        let mut choice = vec![None; n];
        for s in 0..n {
            let Some(q) = action_values(graph, s, prev) else {
                continue;
            };
            if q.iter().any(|x| x.is_nan()) {
                continue;
            }
            if let Some(a) = argbest(&q, true) {
                row[s] = q[a];
                choice[s] = Some(a);
            }
        }
        values.push(row);
        by_steps_to_go.push(choice);
    }

    by_steps_to_go.reverse();
    Ok(Policy::markov(by_steps_to_go).with_values(ValueTable::finite(values)))
}

/// Minimal expected number of measurements until the state first equals the target.
pub fn solve_min_arrival(
    graph: &StateGraph,
    set: &MeasurementSet,
    target: &Target,
    options: ArrivalOptions,
) -> Result<Policy> {
    solve_min_arrival_traced(graph, set, target, options).map(|s| s.policy)
}

/// [`solve_min_arrival`], also returning the residual of every sweep.
///
/// States from which no policy reaches the target with probability one are
/// found first by a graph fixed point; they get value `+inf` and no action,
/// and actions that can leave the almost-surely-reaching set are excluded.
/// The remaining problem has only proper or infinite-cost policies, so
/// Jacobi value iteration from zero converges monotonically.
pub fn solve_min_arrival_traced(
    graph: &StateGraph,
    set: &MeasurementSet,
    target: &Target,
    options: ArrivalOptions,
) -> Result<ArrivalSolution> {
    check_actions(graph, set)?;
    if !graph.is_closed() {
        return Err(Error::TruncatedGraph);
    }
    let n = graph.len();
    let actions = graph.action_count();
    let is_target = graph.target_mask(target);
    let proper = almost_sure_reach(graph, &is_target);

    let stays_proper = |s: usize, a: usize| {
        graph
            .transitions(s, a)
            .is_some_and(|ts| ts.iter().all(|t| proper[t.next]))
    };

    let q_values = |s: usize, v: &[f64]| -> Vec<f64> {
        (0..actions)
            .map(|a| {
                if !stays_proper(s, a) {
                    return f64::INFINITY;
                }
                let ts = graph.transitions(s, a).unwrap_or_default();
                1.0 + ts.iter().map(|t| t.probability * v[t.next]).sum::<f64>()
            })
            .collect()
    };

    let mut v: Vec<f64> = (0..n).map(|s| if proper[s] { 0.0 } else { f64::INFINITY }).collect();
    let mut residuals = Vec::new();
    let mut converged = false;

    for _ in 0..options.max_iters {
        let mut next = v.clone();
        let mut residual = 0.0_f64;
        for s in 0..n {
            if is_target[s] || !proper[s] {
                continue;
            }
            let best = q_values(s, &v).into_iter().fold(f64::INFINITY, f64::min);
            residual = residual.max((best - v[s]).abs());
            next[s] = best;
        }
        v = next;
        residuals.push(residual);
        if residual <= options.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            iterations: options.max_iters,
            residual: residuals.last().copied().unwrap_or(f64::INFINITY),
        });
    }

    let init = v[graph.initial_id()];
    if init > options.value_cap {
        return Err(Error::NoProperPolicy(init));
    }
    for x in v.iter_mut() {
        if *x > options.value_cap {
            *x = f64::INFINITY;
        }
    }

    let choices = (0..n)
        .map(|s| {
            if is_target[s] || !v[s].is_finite() {
                None
            } else {
                argbest(&q_values(s, &v), false)
            }
        })
        .collect();

    Ok(ArrivalSolution {
        policy: Policy::stationary(choices).with_values(ValueTable::stationary(v)),
        residuals,
    })
}

/// States from which some policy reaches a target state with probability one.
///
/// Iterates `U <- {x : x reaches a target through actions whose successors all stay in U}`
/// from `U = all states` down to its greatest fixed point.
fn almost_sure_reach(graph: &StateGraph, is_target: &[bool]) -> Vec<bool> {
    let n = graph.len();
    let mut keep = vec![true; n];
    loop {
        let safe = |s: usize, a: usize, keep: &[bool]| {
            graph
                .transitions(s, a)
                .is_some_and(|ts| ts.iter().all(|t| keep[t.next]))
        };
        let mut reach: Vec<bool> = is_target.to_vec();
        let mut changed = true;
        while changed {
            changed = false;
            for s in 0..n {
                if reach[s] || !keep[s] {
                    continue;
                }
                let hit = (0..graph.action_count()).any(|a| {
                    safe(s, a, &keep)
                        && graph
                            .transitions(s, a)
                            .is_some_and(|ts| ts.iter().any(|t| reach[t.next]))
                });
                if hit {
                    reach[s] = true;
                    changed = true;
                }
            }
        }
        if reach == keep {
            return keep;
        }
        keep = reach;
    }
}
