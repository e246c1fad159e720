//! Reinforced-routing simulation of agent societies.
//!
//! Agents are scheduled round-robin; a scheduled agent routes to a visible
//! alive claim with probability proportional to activity^beta (activity
//! initialized at 1 per claim), draws an event type from the configured mix,
//! and spawns child claims. Delegation opens a new subtask whose kickoff
//! claims start fresh cascades on preferentially chosen assignees; revision
//! and contradiction extend the targeted cascade; merges consolidate branch
//! heads under one root. Runs stop at the step or event budget. Identical
//! configs (seed included) produce bit-identical trace bundles.

mod config;
mod engine;
mod sweep;
mod topology;
mod workload;

pub use config::{EventMix, SimConfig};
pub use engine::{run_simulation, Engine, InjectedMerge, TurnOutcome};
pub use sweep::{run_sweep, SweepOutcome};
pub use topology::{build_topology, Adjacency};
pub use workload::{generate_workload, TaskDag, WorkloadConfig};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("N must be at least 2, got {0}")]
    InvalidN(u32),
    #[error("invalid config: {0}")]
    ConfigError(String),
}
