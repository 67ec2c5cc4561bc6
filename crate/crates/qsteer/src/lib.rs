//! File formats, tables, sweeps and parallel simulation on top of
//! [`qsteer_core`]. The `qsteer` binary is a thin command-line layer over
//! this crate.

pub mod error;
pub mod format;
pub mod parallel;
pub mod report;
pub mod states;
pub mod sweep;
pub mod table;

pub use error::{Error, Result};
pub use format::{
    measurement_set_to_json, parse_measurement_set, read_measurement_set, read_policy, GraphFile, MeasurementSetFile,
    PolicyFile,
};
pub use parallel::{simulate_parallel, worker_pool};
pub use report::{render_records, OutputFormat, ResultRow};
pub use states::parse_state;
pub use table::{policy_table, sig6, state_labels};
