//! JSON file formats for measurement sets, policies and state graphs.

use std::fs;
use std::path::Path;

use qsteer_core::{
    Complex64, ComplexMatrix, DecisionRule, Measurement, MeasurementSet, Outcome, Policy, PolicyKind, StateGraph,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `[re, im]`.
pub type ComplexPair = [f64; 2];

/// Row-major list of rows.
pub type MatrixJson = Vec<Vec<ComplexPair>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSetFile {
    pub dim: usize,
    pub actions: Vec<ActionJson>,
    /// Zero-based index of the measurement onto the target, if any.
    #[serde(default)]
    pub target_action: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionJson {
    pub name: String,
    pub outcomes: Vec<OutcomeJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeJson {
    pub label: String,
    pub kraus: MatrixJson,
}

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    m.rows().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| Error::Format {
        what: "matrix",
        reason: e.to_string(),
    })
}

impl MeasurementSetFile {
    pub fn from_set(set: &MeasurementSet) -> Self {
        Self {
            dim: set.dim(),
            actions: set
                .actions()
                .iter()
                .map(|m| ActionJson {
                    name: m.name().to_string(),
                    outcomes: m
                        .outcomes()
                        .iter()
                        .map(|o| OutcomeJson {
                            label: o.label.clone(),
                            kraus: matrix_to_json(&o.kraus),
                        })
                        .collect(),
                })
                .collect(),
            target_action: set.target_action(),
        }
    }

    /// Validates shapes, completeness and the target action.
    pub fn to_set(&self) -> Result<MeasurementSet> {
        let bad = |reason: String| Error::Format {
            what: "measurement set",
            reason,
        };
        let mut actions = Vec::with_capacity(self.actions.len());
        for (i, a) in self.actions.iter().enumerate() {
            let mut outcomes = Vec::with_capacity(a.outcomes.len());
            for o in &a.outcomes {
                let kraus =
                    matrix_from_json(&o.kraus).map_err(|e| bad(format!("action {i} outcome `{}`: {e}", o.label)))?;
                if kraus.dim() != self.dim {
                    return Err(bad(format!(
                        "action {i} outcome `{}` is {}x{}, expected {}x{}",
                        o.label,
                        kraus.dim(),
                        kraus.dim(),
                        self.dim,
                        self.dim
                    )));
                }
                outcomes.push(Outcome {
                    label: o.label.clone(),
                    kraus,
                });
            }
            actions.push(Measurement::new(a.name.clone(), outcomes).map_err(|e| bad(format!("action {i}: {e}")))?);
        }
        MeasurementSet::new(self.dim, actions, self.target_action).map_err(|e| bad(e.to_string()))
    }
}

pub fn parse_measurement_set(json: &str) -> Result<MeasurementSet> {
    let file: MeasurementSetFile = serde_json::from_str(json).map_err(|e| Error::Format {
        what: "measurement set",
        reason: e.to_string(),
    })?;
    file.to_set()
}

pub fn read_measurement_set(path: &Path) -> Result<MeasurementSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_measurement_set(&text)
}

pub fn measurement_set_to_json(set: &MeasurementSet) -> Result<String> {
    Ok(serde_json::to_string_pretty(&MeasurementSetFile::from_set(set))?)
}

/// One decision. `step` is absent for stationary policies and `state_id`
/// for open-loop sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceJson {
    #[serde(default)]
    pub step: Option<usize>,
    #[serde(default)]
    pub state_id: Option<usize>,
    pub action: usize,
}

/// Exported policy.
///
/// `values[k][s]` is the optimal value at decision step `k` (so the last row,
/// `k = horizon`, is the terminal payoff); stationary policies have a single
/// row. Undefined and infinite values are written as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyFile {
    pub kind: String,
    pub horizon: Option<usize>,
    pub choices: Vec<ChoiceJson>,
    #[serde(default)]
    pub values: Vec<Vec<Option<f64>>>,
    #[serde(default)]
    pub actions: Vec<String>,
    #[serde(default)]
    pub states: Vec<String>,
}

fn kind_name(kind: PolicyKind) -> &'static str {
    match kind {
        PolicyKind::Markov => "markov",
        PolicyKind::Stationary => "stationary",
        PolicyKind::DeterministicSequence => "sequence",
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl PolicyFile {
    pub fn from_policy(policy: &Policy, set: &MeasurementSet, labels: &[String]) -> Self {
        let mut choices = Vec::new();
        match policy.rule() {
            DecisionRule::Markov { choices: grid } => {
                for (k, row) in grid.iter().enumerate() {
                    for (s, a) in row.iter().enumerate() {
                        if let Some(a) = *a {
                            choices.push(ChoiceJson {
                                step: Some(k),
                                state_id: Some(s),
                                action: a,
                            });
                        }
                    }
                }
            }
            DecisionRule::Stationary { choices: row } => {
                for (s, a) in row.iter().enumerate() {
                    if let Some(a) = *a {
                        choices.push(ChoiceJson {
                            step: None,
                            state_id: Some(s),
                            action: a,
                        });
                    }
                }
            }
            DecisionRule::Sequence { actions } => {
                for (k, &a) in actions.iter().enumerate() {
                    choices.push(ChoiceJson {
                        step: Some(k),
                        state_id: None,
                        action: a,
                    });
                }
            }
        }
        let values = match (policy.values(), policy.horizon()) {
            (Some(table), Some(n)) => (0..=n)
                .map(|k| table.rows()[n - k].iter().copied().map(finite).collect())
                .collect(),
            (Some(table), None) => table
                .rows()
                .iter()
                .map(|row| row.iter().copied().map(finite).collect())
                .collect(),
            (None, _) => Vec::new(),
        };
        Self {
            kind: kind_name(policy.kind()).to_string(),
            horizon: policy.horizon(),
            choices,
            values,
            actions: set.actions().iter().map(|m| m.name().to_string()).collect(),
            states: labels.to_vec(),
        }
    }

    /// Rebuilds the decision rule over a graph with `state_count` states.
    /// Value tables are not restored.
    pub fn to_policy(&self, state_count: usize) -> Result<Policy> {
        let bad = |reason: String| Error::Format { what: "policy", reason };
        let need_state = |c: &ChoiceJson| -> Result<usize> {
            match c.state_id {
                Some(s) if s < state_count => Ok(s),
                Some(s) => Err(bad(format!("state_id {s} out of range for {state_count} states"))),
                None => Err(bad("choice without state_id".into())),
            }
        };
        let need_step = |c: &ChoiceJson, horizon: usize| -> Result<usize> {
            match c.step {
                Some(k) if k < horizon => Ok(k),
                Some(k) => Err(bad(format!("step {k} beyond horizon {horizon}"))),
                None => Err(bad("choice without step".into())),
            }
        };
        match self.kind.as_str() {
            "markov" => {
                let n = self
                    .horizon
                    .ok_or_else(|| bad("markov policy without horizon".into()))?;
                let mut grid = vec![vec![None; state_count]; n];
                for c in &self.choices {
                    grid[need_step(c, n)?][need_state(c)?] = Some(c.action);
                }
                Ok(Policy::markov(grid))
            }
            "stationary" => {
                let mut row = vec![None; state_count];
                for c in &self.choices {
                    row[need_state(c)?] = Some(c.action);
                }
                Ok(Policy::stationary(row))
            }
            "sequence" => {
                let n = self
                    .horizon
                    .ok_or_else(|| bad("sequence policy without horizon".into()))?;
                let mut actions = vec![None; n];
                for c in &self.choices {
                    actions[need_step(c, n)?] = Some(c.action);
                }
                let actions = actions
                    .into_iter()
                    .enumerate()
                    .map(|(k, a)| a.ok_or_else(|| bad(format!("no action for step {k}"))))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Policy::sequence(actions))
            }
            other => Err(bad(format!("unknown policy kind `{other}`"))),
        }
    }
}

pub fn read_policy(path: &Path, state_count: usize) -> Result<Policy> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let file: PolicyFile = serde_json::from_str(&text).map_err(|e| Error::Format {
        what: "policy",
        reason: e.to_string(),
    })?;
    file.to_policy(state_count)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub from: usize,
    pub action: usize,
    pub outcome: usize,
    pub probability: f64,
    pub to: usize,
}

/// Exported reachable-state graph. States at the horizon of a truncated
/// graph are listed with `expanded = false` and have no outgoing edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub dim: usize,
    pub actions: Vec<String>,
    pub states: Vec<MatrixJson>,
    pub labels: Vec<String>,
    pub depth: Vec<usize>,
    pub expanded: Vec<bool>,
    pub edges: Vec<EdgeJson>,
    pub initial_id: usize,
    pub target_id: Option<usize>,
    pub horizon: Option<usize>,
}

impl GraphFile {
    pub fn from_graph(graph: &StateGraph, set: &MeasurementSet, labels: &[String]) -> Self {
        let mut edges = Vec::new();
        for s in 0..graph.len() {
            for a in 0..graph.action_count() {
                for t in graph.transitions(s, a).unwrap_or(&[]) {
                    edges.push(EdgeJson {
                        from: s,
                        action: a,
                        outcome: t.outcome,
                        probability: t.probability,
                        to: t.next,
                    });
                }
            }
        }
        Self {
            dim: graph.dim(),
            actions: set.actions().iter().map(|m| m.name().to_string()).collect(),
            states: graph.states().iter().map(|s| matrix_to_json(s.matrix())).collect(),
            labels: labels.to_vec(),
            depth: (0..graph.len()).map(|s| graph.depth(s)).collect(),
            expanded: (0..graph.len()).map(|s| graph.is_expanded(s)).collect(),
            edges,
            initial_id: graph.initial_id(),
            target_id: graph.target_id(),
            horizon: graph.horizon(),
        }
    }
}
