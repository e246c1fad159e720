//! Event-level analysis of coordination cascades in multi-agent systems.
//!
//! The library covers the full loop from raw traces to intervention:
//!
//! - [`trace`]: the line-delimited event schema, ingestion, and structural
//!   validation of coordination traces.
//! - [`graph`]: reconstruction of the subtask tree and claim DAG, derived
//!   groupings (revision chains, contradiction groups, merge groups), and
//!   root-indexed cascade extraction.
//! - [`observables`]: event-size observables (delegation cascades, revision
//!   waves, contradiction bursts, merge fan-ins, total cognitive effort),
//!   concentration and inequality metrics, and cascade composition.
//! - [`tail`]: discrete heavy-tail inference — CCDFs, maximum-likelihood fits
//!   for power-law / truncated power-law / log-normal / exponential families,
//!   KS-minimizing `x_min` selection, Vuong model comparison, bootstrap
//!   confidence intervals, extreme-value scaling, and preferential-attachment
//!   estimation.
//! - [`sim`]: a reinforced-routing simulator over configurable topologies and
//!   synthetic workloads that emits traces in the same schema, closing the
//!   loop with the analysis pipeline.
//! - [`dti`]: the deficit-triggered integration controller, its calibration
//!   from baseline traces, and simulator integration.
//! - [`export`]: CSV/JSON report writers shared by the CLI.

pub mod analysis;
pub mod dti;
pub mod export;
pub mod graph;
pub mod observables;
pub mod sim;
pub mod tail;
pub mod trace;
