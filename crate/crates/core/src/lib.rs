//! Measurement-selection feedback policies for steering a quantum state onto
//! a target state.
//!
//! A finite set of measurements is the only control. Every measurement
//! changes the state through its back-action, and a policy chooses the next
//! measurement from the outcomes seen so far. This crate builds the reachable
//! post-measurement states as a finite Markov decision process and solves it
//! for three objectives:
//!
//! * probability of being exactly on the target after `N` measurements,
//! * expected overlap `<t|rho_N|t>` with the target after `N` measurements,
//! * expected number of measurements until the target is first reached.
//!
//! The crate is `no_std` and needs only `alloc`.
//!
//! ```
//! use qsteer_core::{build_standard_set, enumerate_closed, solve_max_success, DensityMatrix, Target};
//!
//! let set = build_standard_set(10).unwrap();
//! let zero = DensityMatrix::basis(2, 0).unwrap();
//! let target = Target::new(DensityMatrix::basis(2, 1).unwrap()).unwrap();
//! let graph = enumerate_closed(&zero, &set).unwrap();
//! let policy = solve_max_success(&graph, &set, 10, &target).unwrap();
//! let best = policy.values().unwrap().value(10, graph.initial_id());
//! assert!((best - 0.9968).abs() < 5e-4);
//! ```

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
pub mod evaluate;
pub mod graph;
pub mod matrix;
pub mod measurement;
pub mod policy;
pub mod simulate;
pub mod solve;
pub mod state;

pub use error::{Error, Result};
pub use evaluate::{evaluate_policy_exact, make_naive_policy, make_s1_policy, Evaluation, StateDistribution};
pub use graph::{canonical_key, enumerate_closed, enumerate_reachable, CanonicalKey, StateGraph, Transition};
pub use matrix::ComplexMatrix;
pub use measurement::{
    apply_measurement, build_standard_set, unconditional_evolve, Branch, Measurement, MeasurementSet, Outcome,
};
pub use num_complex::Complex64;
pub use policy::{DecisionRule, Policy, PolicyKind, ValueKind, ValueTable};
pub use simulate::{simulate, SimulationSummary, TrajectoryRecord};
pub use solve::{solve_max_fidelity, solve_max_success, solve_min_arrival, ArrivalOptions};
pub use state::{fidelity, is_target, make_pure_state, DensityMatrix, Target};
