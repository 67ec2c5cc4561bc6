//! Reachable-state enumeration.
//!
//! States are deduplicated by a quantized key over the density-matrix
//! entries. The key is only an index: a lookup also probes the neighbouring
//! grid cells of every coordinate that sits close to a rounding boundary, and
//! a candidate is accepted only when it lies within [`MATCH_TOL`] entrywise.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::measurement::{apply_measurement, MeasurementSet};
use crate::state::{DensityMatrix, Target};

/// Grid spacing of [`CanonicalKey`].
pub const KEY_RESOLUTION: f64 = 1e-8;

/// Two states closer than this (entrywise) are treated as the same vertex.
pub const MATCH_TOL: f64 = 1e-9;

pub const DEFAULT_MAX_STATES: usize = 10_000;

/// Above this many boundary-straddling coordinates the lookup falls back to a linear scan.
const MAX_AMBIGUOUS: usize = 10;

/// Real and imaginary parts of every entry, rounded to multiples of [`KEY_RESOLUTION`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(pub Vec<i64>);

/// Quantized key of `rho`. Density matrices are already invariant under the
/// global phase of a pure state, so no further normalization is needed.
pub fn canonical_key(rho: &DensityMatrix) -> CanonicalKey {
    CanonicalKey(coordinates(rho).map(quantize).collect())
}

fn coordinates(rho: &DensityMatrix) -> impl Iterator<Item = f64> + '_ {
    rho.matrix().as_slice().iter().flat_map(|z| [z.re, z.im])
}

fn quantize(x: f64) -> i64 {
    libm::round(x / KEY_RESOLUTION) as i64
}

/// One outgoing branch of a `(state, action)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    /// Index into the measurement's outcomes.
    pub outcome: usize,
    pub probability: f64,
    pub next: usize,
}

/// The Markov chain of post-measurement states reachable from an initial state.
#[derive(Debug, Clone)]
pub struct StateGraph {
    dim: usize,
    action_count: usize,
    states: Vec<DensityMatrix>,
    /// BFS layer at which each state was first reached.
    depth: Vec<usize>,
    /// `edges[s]` is `None` for states left unexpanded by a horizon cut,
    /// otherwise one transition list per action.
    edges: Vec<Option<Vec<Vec<Transition>>>>,
    initial_id: usize,
    target_id: Option<usize>,
    horizon: Option<usize>,
    index: BTreeMap<CanonicalKey, Vec<usize>>,
}

impl StateGraph {
    fn empty(dim: usize, action_count: usize) -> Self {
        Self {
            dim,
            action_count,
            states: Vec::new(),
            depth: Vec::new(),
            edges: Vec::new(),
            initial_id: 0,
            target_id: None,
            horizon: None,
            index: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn state(&self, id: usize) -> Result<&DensityMatrix> {
        self.states.get(id).ok_or(Error::UnknownState(id))
    }

    pub fn depth(&self, id: usize) -> usize {
        self.depth[id]
    }

    pub fn initial_id(&self) -> usize {
        self.initial_id
    }

    /// First state recognised by [`StateGraph::mark_target`], if any.
    pub fn target_id(&self) -> Option<usize> {
        self.target_id
    }

    /// Horizon at which expansion was cut, `None` for a closed graph.
    pub fn horizon(&self) -> Option<usize> {
        self.horizon
    }

    pub fn is_closed(&self) -> bool {
        self.edges.iter().all(Option::is_some)
    }

    pub fn is_expanded(&self, id: usize) -> bool {
        self.edges.get(id).is_some_and(Option::is_some)
    }

    /// Transitions for `(state, action)`; `None` if the state was not expanded.
    pub fn transitions(&self, state: usize, action: usize) -> Option<&[Transition]> {
        self.edges
            .get(state)?
            .as_ref()
            .and_then(|per_action| per_action.get(action))
            .map(Vec::as_slice)
    }

    /// Records and returns the id of the first state matching `target`.
    pub fn mark_target(&mut self, target: &Target) -> Option<usize> {
        self.target_id = self.states.iter().position(|s| target.matches(s));
        self.target_id
    }

    /// Per-state flag: does the state match `target`?
    pub fn target_mask(&self, target: &Target) -> Vec<bool> {
        self.states.iter().map(|s| target.matches(s)).collect()
    }

    /// Id of the stored state within [`MATCH_TOL`] of `rho`.
    pub fn find(&self, rho: &DensityMatrix) -> Option<usize> {
        if rho.dim() != self.dim {
            return None;
        }
        let coords: Vec<f64> = coordinates(rho).collect();
        let mut key: Vec<i64> = coords.iter().map(|&x| quantize(x)).collect();
        let alternates: Vec<(usize, i64)> = coords
            .iter()
            .enumerate()
            .filter_map(|(i, &x)| {
                let scaled = x / KEY_RESOLUTION;
                let frac = scaled - libm::floor(scaled);
                let margin = MATCH_TOL / KEY_RESOLUTION;
                ((frac - 0.5).abs() < margin).then(|| {
                    let other = if scaled - libm::round(scaled) < 0.0 {
                        key[i] - 1
                    } else {
                        key[i] + 1
                    };
                    (i, other)
                })
            })
            .collect();

        let close = |id: &usize| self.states[*id].matrix().max_abs_diff(rho.matrix()) <= MATCH_TOL;

        if alternates.len() > MAX_AMBIGUOUS {
            return (0..self.states.len()).find(close);
        }
        let primary = key.clone();
        for mask in 0u32..(1 << alternates.len()) {
            key.copy_from_slice(&primary);
            for (bit, &(i, other)) in alternates.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    key[i] = other;
                }
            }
            if let Some(ids) = self.index.get(&CanonicalKey(key.clone())) {
                if let Some(&id) = ids.iter().find(|id| close(id)) {
                    return Some(id);
                }
            }
        }
        None
    }

    fn insert(&mut self, rho: DensityMatrix, depth: usize) -> (usize, bool) {
        if let Some(id) = self.find(&rho) {
            return (id, false);
        }
        let id = self.states.len();
        self.index.entry(canonical_key(&rho)).or_default().push(id);
        self.states.push(rho);
        self.depth.push(depth);
        self.edges.push(None);
        (id, true)
    }
}

/// Breadth-first closure of `{rho0}` under every action and surviving outcome.
///
/// State ids follow discovery order, with actions in set order and outcomes
/// in declaration order. With `horizon = Some(h)` states first reached at
/// depth `h` are kept but not expanded. Exceeding `max_states` is an error.
pub fn enumerate_reachable(
    rho0: &DensityMatrix,
    set: &MeasurementSet,
    max_states: usize,
    horizon: Option<usize>,
) -> Result<StateGraph> {
    if rho0.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: rho0.dim(),
        });
    }
    let mut graph = StateGraph::empty(set.dim(), set.len());
    graph.horizon = horizon;
    let (initial, _) = graph.insert(rho0.clone(), 0);
    graph.initial_id = initial;

    let mut queue = VecDeque::from([initial]);
    while let Some(id) = queue.pop_front() {
        let depth = graph.depth[id];
        if horizon.is_some_and(|h| depth >= h) {
            continue;
        }
        let mut per_action = Vec::with_capacity(set.len());
        for action in set.actions() {
            let branches = apply_measurement(&graph.states[id], action)?;
            let mut out = Vec::with_capacity(branches.len());
            for b in branches {
                let (next, fresh) = graph.insert(b.state, depth + 1);
                if fresh {
                    if graph.states.len() > max_states {
                        return Err(Error::StateExplosion(max_states));
                    }
                    queue.push_back(next);
                }
                out.push(Transition {
                    outcome: b.outcome,
                    probability: b.probability,
                    next,
                });
            }
            per_action.push(out);
        }
        graph.edges[id] = Some(per_action);
    }
    Ok(graph)
}

/// Convenience wrapper: closed graph with the default state cap.
pub fn enumerate_closed(rho0: &DensityMatrix, set: &MeasurementSet) -> Result<StateGraph> {
    enumerate_reachable(rho0, set, DEFAULT_MAX_STATES, None)
}

/// Per-step reachability of the layered graph: `layers[k][s]` is true if `s`
/// can be occupied after exactly `k` measurements under some action sequence.
pub fn reachable_layers(graph: &StateGraph, steps: usize) -> Vec<Vec<bool>> {
    let mut layers = vec![vec![false; graph.len()]; steps + 1];
    layers[0][graph.initial_id] = true;
    for k in 0..steps {
        for s in 0..graph.len() {
            if !layers[k][s] {
                continue;
            }
            for a in 0..graph.action_count {
                if let Some(ts) = graph.transitions(s, a) {
                    for t in ts {
                        layers[k + 1][t.next] = true;
                    }
                }
            }
        }
    }
    layers
}
