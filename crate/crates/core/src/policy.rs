//! Policies and the value tables that come with optimal ones.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// How a [`ValueTable`] is indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    /// `values[t][s]` is the optimal value with `t` steps to go, `t = 0..=horizon`.
    FiniteHorizon { horizon: usize },
    /// `values[0][s]` is the optimal stationary value.
    Stationary,
}

/// Optimal values per state (and per steps-to-go for finite horizons).
///
/// Entries that are not defined (states a truncated graph cannot supply
/// successors for) are `NaN`; improper states of the arrival-time objective
/// are `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    kind: ValueKind,
    values: Vec<Vec<f64>>,
}

impl ValueTable {
    pub(crate) fn finite(values: Vec<Vec<f64>>) -> Self {
        let horizon = values.len() - 1;
        Self {
            kind: ValueKind::FiniteHorizon { horizon },
            values,
        }
    }

    pub(crate) fn stationary(values: Vec<f64>) -> Self {
        Self {
            kind: ValueKind::Stationary,
            values: vec![values],
        }
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    /// Value with `steps_to_go` remaining; for stationary tables the argument is ignored.
    pub fn value(&self, steps_to_go: usize, state: usize) -> f64 {
        match self.kind {
            ValueKind::FiniteHorizon { .. } => self.values[steps_to_go][state],
            ValueKind::Stationary => self.values[0][state],
        }
    }

    /// Value at decision step `k` (`horizon - k` steps to go).
    pub fn value_at_step(&self, step: usize, state: usize) -> f64 {
        match self.kind {
            ValueKind::FiniteHorizon { horizon } => self.values[horizon - step][state],
            ValueKind::Stationary => self.values[0][state],
        }
    }

    /// Raw rows: by steps-to-go for finite tables, a single row for stationary ones.
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn is_improper(&self, state: usize) -> bool {
        self.kind == ValueKind::Stationary && self.values[0][state].is_infinite()
    }
}

/// The decision part of a policy.
#[derive(Debug, Clone, PartialEq)]
pub enum DecisionRule {
    /// `choices[k][s]`: action at step `k` in state `s`.
    Markov { choices: Vec<Vec<Option<usize>>> },
    /// `choices[s]`: action in state `s` at every step; `None` where the run stops.
    Stationary { choices: Vec<Option<usize>> },
    /// Open-loop: `actions[k]` at step `k` regardless of state.
    Sequence { actions: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    Markov,
    Stationary,
    DeterministicSequence,
}

/// A measurement-selection policy, optionally with the value table it is optimal for.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    rule: DecisionRule,
    values: Option<ValueTable>,
}

impl Policy {
    pub fn new(rule: DecisionRule) -> Self {
        Self { rule, values: None }
    }

    pub fn markov(choices: Vec<Vec<Option<usize>>>) -> Self {
        Self::new(DecisionRule::Markov { choices })
    }

    pub fn stationary(choices: Vec<Option<usize>>) -> Self {
        Self::new(DecisionRule::Stationary { choices })
    }

    pub fn sequence(actions: Vec<usize>) -> Self {
        Self::new(DecisionRule::Sequence { actions })
    }

    pub(crate) fn with_values(mut self, values: ValueTable) -> Self {
        self.values = Some(values);
        self
    }

    pub fn rule(&self) -> &DecisionRule {
        &self.rule
    }

    pub fn values(&self) -> Option<&ValueTable> {
        self.values.as_ref()
    }

    pub fn kind(&self) -> PolicyKind {
        match self.rule {
            DecisionRule::Markov { .. } => PolicyKind::Markov,
            DecisionRule::Stationary { .. } => PolicyKind::Stationary,
            DecisionRule::Sequence { .. } => PolicyKind::DeterministicSequence,
        }
    }

    /// Number of decisions; `None` for stationary policies.
    pub fn horizon(&self) -> Option<usize> {
        match &self.rule {
            DecisionRule::Markov { choices } => Some(choices.len()),
            DecisionRule::Sequence { actions } => Some(actions.len()),
            DecisionRule::Stationary { .. } => None,
        }
    }

    /// Action chosen at `step` in `state`, if the policy defines one there.
    pub fn action(&self, step: usize, state: usize) -> Option<usize> {
        match &self.rule {
            DecisionRule::Markov { choices } => choices.get(step)?.get(state).copied().flatten(),
            DecisionRule::Stationary { choices } => choices.get(state).copied().flatten(),
            DecisionRule::Sequence { actions } => actions.get(step).copied(),
        }
    }

    /// Checks every chosen action against the size of the action set.
    pub fn validate(&self, action_count: usize) -> Result<()> {
        let bad = |a: &usize| *a >= action_count;
        let offending = match &self.rule {
            DecisionRule::Markov { choices } => choices.iter().flatten().flatten().find(|a| bad(a)),
            DecisionRule::Stationary { choices } => choices.iter().flatten().find(|a| bad(a)),
            DecisionRule::Sequence { actions } => actions.iter().find(|a| bad(a)),
        };
        match offending {
            Some(&a) => Err(Error::UnknownAction(a)),
            None => Ok(()),
        }
    }

    /// Follows `self` for its horizon and then plays `action` in every state once more.
    pub fn then_play(&self, action: usize, state_count: usize) -> Result<Self> {
        let mut choices = match &self.rule {
            DecisionRule::Markov { choices } => choices.clone(),
            DecisionRule::Sequence { actions } => actions.iter().map(|&a| vec![Some(a); state_count]).collect(),
            DecisionRule::Stationary { .. } => return Err(Error::NoHorizon),
        };
        choices.push(vec![Some(action); state_count]);
        Ok(Self::markov(choices))
    }
}
