//! Reconstruction of coordination structures from validated traces.
//!
//! Two separate structures are rebuilt per run and never conflated: the
//! subtask tree (what agents were asked to work on, from delegation events)
//! and the claim DAG (how reasoning evolved, from claim lineage fields).
//! Root identifiers propagate from the earliest ancestor; cascades are the
//! root-indexed partitions of the claim DAG plus the events attached to them.

mod cascades;
mod claims;
mod subtasks;

pub use cascades::{extract_cascades, Cascade};
pub use claims::{
    build_claim_graph, derive_groupings, ClaimGraph, ClaimNode, ContradictionGroup, RevisionChain,
};
pub use subtasks::{build_subtask_tree, SubtaskNode, SubtaskTree};

use thiserror::Error;

/// Default contradiction-grouping window, in `step_id` units.
pub const DEFAULT_TAU: u64 = 10;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("lineage cycle detected at `{0}`")]
    CycleError(String),
    #[error("parent `{0}` is not defined anywhere in the run")]
    DanglingParent(String),
}
