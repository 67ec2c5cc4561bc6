use alloc::string::String;

/// Errors raised by state construction, enumeration, solving and evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate state vector")]
    DegenerateStateVector,

    #[error("set too small: need at least 2 measurements, got {0}")]
    SetTooSmall(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix entries do not form a {dim}x{dim} array")]
    Shape { dim: usize },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not one (|tr - 1| = {0:e})")]
    TraceNotOne(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("measurement `{name}` violates completeness (deviation {deviation:e})")]
    Incomplete { name: String, deviation: f64 },

    #[error("measurement `{0}` has no outcomes")]
    NoOutcomes(String),

    #[error("invalid target action: {0}")]
    InvalidTargetAction(String),

    #[error("target state must be pure")]
    TargetNotPure,

    #[error("state explosion: more than {0} reachable states")]
    StateExplosion(usize),

    #[error("graph was truncated at depth {depth}, horizon {horizon} needs a deeper graph")]
    HorizonTooShort { depth: usize, horizon: usize },

    #[error("graph has {graph} actions but the measurement set has {set}")]
    ActionCountMismatch { graph: usize, set: usize },

    #[error("arrival-time objective needs a fully closed graph")]
    TruncatedGraph,

    #[error("no proper policy: expected arrival time from the initial state is {0}")]
    NoProperPolicy(f64),

    #[error("value iteration not converged after {iterations} sweeps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("unknown state id {0}")]
    UnknownState(usize),

    #[error("state is not in the reachable graph")]
    StateNotInGraph,

    #[error("policy has no decision at step {step} for state {state}")]
    MissingDecision { step: usize, state: usize },

    #[error("action index {0} is out of range")]
    UnknownAction(usize),

    #[error("horizon {horizon} exceeds the number of measurements {actions}")]
    HorizonExceedsSet { horizon: usize, actions: usize },

    #[error("policy needs the standard set with T = {0}")]
    WrongSet(usize),

    #[error("stationary policies have no fixed horizon")]
    NoHorizon,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
