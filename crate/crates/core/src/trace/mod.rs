//! Event-level trace model, ingestion, and structural validation.
//!
//! A trace is a line-delimited JSON stream. Each line is either one
//! [`EventRecord`] or a run-metadata object (`{"run_meta": {...}}`). Records
//! carry raw lineage fields only; derived groupings (revision chains,
//! contradiction groups, merge ids) are always recomputed downstream and never
//! read from input. All temporal ordering uses `step_id`; `timestamp` is
//! carried through untouched.

mod model;
mod parse;
mod validate;

pub use model::{
    ClaimPayload, ClaimStatus, EventRecord, EventType, RunMeta, RunView, SubtaskPayload,
    SubtaskStatus, TaskFamily, Timestamp, Topology, TraceBundle,
};
pub use parse::{parse_trace, parse_trace_path, write_jsonl, write_jsonl_path, ParseOutcome};
pub use validate::{validate_bundle, ValidationReport, Violation, ViolationKind};

use thiserror::Error;

/// Errors raised by trace ingestion.
#[derive(Debug, Error)]
pub enum TraceError {
    /// The input stream held zero lines.
    #[error("empty input: no lines to parse")]
    EmptyInput,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// One malformed line, reported with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SchemaError {
    pub line: usize,
    pub message: String,
}
