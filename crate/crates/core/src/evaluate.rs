//! Exact forward evaluation of policies and the benchmark policies.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::StateGraph;
use crate::measurement::{build_standard_set, standard_basis_vectors, MeasurementSet};
use crate::policy::Policy;
use crate::state::{make_pure_state, Target, STATE_TOL};

/// Law of the state after some number of steps, indexed by graph state id.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDistribution {
    probs: Vec<f64>,
}

impl StateDistribution {
    pub fn point(len: usize, state: usize) -> Self {
        let mut probs = vec![0.0; len];
        probs[state] = 1.0;
        Self { probs }
    }

    pub fn probability(&self, state: usize) -> f64 {
        self.probs.get(state).copied().unwrap_or(0.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `(state, probability)` pairs with positive mass.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs.iter().copied().enumerate().filter(|&(_, p)| p > 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    /// `P(rho_N = target)`.
    pub success_probability: f64,
    /// `E[<t|rho_N|t>]`, the expected-fidelity objective.
    pub fidelity_expectation: f64,
    /// Distribution after each of the steps `0..=N`.
    pub distributions: Vec<StateDistribution>,
}

/// Propagates the exact outcome law of `policy` through `graph` from `initial`.
pub fn evaluate_policy_exact(
    policy: &Policy,
    graph: &StateGraph,
    initial: usize,
    target: &Target,
) -> Result<Evaluation> {
    let horizon = policy.horizon().ok_or(Error::NoHorizon)?;
    if initial >= graph.len() {
        return Err(Error::UnknownState(initial));
    }
    if let Some(depth) = graph.horizon() {
        if depth < horizon {
            return Err(Error::HorizonTooShort { depth, horizon });
        }
    }
    policy.validate(graph.action_count())?;

    let mut current = StateDistribution::point(graph.len(), initial);
    let mut distributions = Vec::with_capacity(horizon + 1);
    for step in 0..horizon {
        let mut next = vec![0.0; graph.len()];
        for (state, mass) in current.support() {
            let action = policy
                .action(step, state)
                .ok_or(Error::MissingDecision { step, state })?;
            let ts = graph.transitions(state, action).ok_or(Error::HorizonTooShort {
                depth: graph.depth(state),
                horizon,
            })?;
            for t in ts {
                next[t.next] += mass * t.probability;
            }
        }
        distributions.push(current);
        current = StateDistribution { probs: next };
    }

    let hits = graph.target_mask(target);
    let mut success_probability = 0.0;
    let mut fidelity_expectation = 0.0;
    for (state, mass) in current.support() {
        if hits[state] {
            success_probability += mass;
        }
        fidelity_expectation += mass * target.overlap(&graph.states()[state]);
    }
    distributions.push(current);
    Ok(Evaluation {
        success_probability,
        fidelity_expectation,
        distributions,
    })
}

/// Open-loop policy playing `E_1, ..., E_N` in turn.
pub fn make_naive_policy(set: &MeasurementSet, horizon: usize) -> Result<Policy> {
    if horizon > set.len() {
        return Err(Error::HorizonExceedsSet {
            horizon,
            actions: set.len(),
        });
    }
    Ok(Policy::sequence((0..horizon).collect()))
}

/// The one-bit feedback rule for `T = 3`: play `E_1`; then `E_3` if the first
/// outcome was `|psi_1>` and `E_2` otherwise; then `E_3`.
///
/// `graph` must contain the states reachable from the initial state under `set`.
pub fn make_s1_policy(set: &MeasurementSet, graph: &StateGraph) -> Result<Policy> {
    let reference = build_standard_set(3)?;
    let same = set.len() == reference.len()
        && set.dim() == reference.dim()
        && set.actions().iter().zip(reference.actions()).all(|(a, b)| {
            a.outcomes().len() == b.outcomes().len()
                && a.outcomes()
                    .iter()
                    .zip(b.outcomes())
                    .all(|(x, y)| x.kraus.max_abs_diff(&y.kraus) <= STATE_TOL)
        });
    if !same || graph.action_count() != 3 {
        return Err(Error::WrongSet(3));
    }
    let psi_1 = make_pure_state(&standard_basis_vectors(3, 1).1)?;
    let psi_1_id = graph.find(&psi_1);

    let n = graph.len();
    let second = (0..n).map(|s| Some(if Some(s) == psi_1_id { 2 } else { 1 })).collect();
    Ok(Policy::markov(vec![vec![Some(0); n], second, vec![Some(2); n]]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::enumerate_closed;
    use crate::policy::PolicyKind;
    use crate::state::DensityMatrix;

    fn one() -> Target {
        Target::new(DensityMatrix::basis(2, 1).unwrap()).unwrap()
    }

    #[test]
    fn naive_policy_shapes() {
        let set = build_standard_set(5).unwrap();
        let p = make_naive_policy(&set, 5).unwrap();
        assert_eq!(p.kind(), PolicyKind::DeterministicSequence);
        assert_eq!(
            (0..5).map(|k| p.action(k, 0).unwrap()).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, 4]
        );
        assert_eq!(make_naive_policy(&set, 1).unwrap().horizon(), Some(1));
        assert_eq!(make_naive_policy(&set, 0).unwrap().horizon(), Some(0));
        assert_eq!(
            make_naive_policy(&set, 6),
            Err(Error::HorizonExceedsSet { horizon: 6, actions: 5 })
        );
    }

    #[test]
    fn s1_policy_decisions() {
        let set = build_standard_set(3).unwrap();
        let zero = DensityMatrix::basis(2, 0).unwrap();
        let g = enumerate_closed(&zero, &set).unwrap();
        let p = make_s1_policy(&set, &g).unwrap();
        let psi_1 = g
            .find(&make_pure_state(&standard_basis_vectors(3, 1).1).unwrap())
            .unwrap();
        let phi_1 = g
            .find(&make_pure_state(&standard_basis_vectors(3, 1).0).unwrap())
            .unwrap();
        assert_eq!(p.action(1, psi_1), Some(2));
        assert_eq!(p.action(1, phi_1), Some(1));
        assert_eq!(p.action(0, g.initial_id()), Some(0));
        assert_eq!(p.action(2, phi_1), Some(2));
    }

    #[test]
    fn s1_requires_standard_three_set() {
        let set = build_standard_set(4).unwrap();
        let g = enumerate_closed(&DensityMatrix::basis(2, 0).unwrap(), &set).unwrap();
        assert_eq!(make_s1_policy(&set, &g), Err(Error::WrongSet(3)));
    }

    #[test]
    fn naive_three_step_success_is_nine_sixteenths() {
        // P(phi_2) = 10/16, P(psi_2) = 6/16, then E_3 hits |1> w.p. 3/4 and 1/4: 9/16.
        let set = build_standard_set(3).unwrap();
        let g = enumerate_closed(&DensityMatrix::basis(2, 0).unwrap(), &set).unwrap();
        let p = make_naive_policy(&set, 3).unwrap();
        let eval = evaluate_policy_exact(&p, &g, g.initial_id(), &one()).unwrap();
        assert!((eval.success_probability - 0.5625).abs() < 1e-12);
        assert_eq!(eval.distributions.len(), 4);
        for d in &eval.distributions {
            assert!((d.total() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn missing_decision_is_an_error() {
        let set = build_standard_set(3).unwrap();
        let g = enumerate_closed(&DensityMatrix::basis(2, 0).unwrap(), &set).unwrap();
        let p = Policy::markov(vec![vec![None; g.len()]]);
        assert_eq!(
            evaluate_policy_exact(&p, &g, 0, &one()).unwrap_err(),
            Error::MissingDecision { step: 0, state: 0 }
        );
        assert_eq!(
            evaluate_policy_exact(&Policy::sequence(vec![]), &g, 99, &one()).unwrap_err(),
            Error::UnknownState(99)
        );
    }
}
