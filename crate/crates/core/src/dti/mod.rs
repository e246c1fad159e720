//! Deficit-triggered integration.
//!
//! Per active root r the controller tracks events elapsed in the current
//! segment (t_r) and realized merges (M_r). Exploration pressure is
//! P_r = a_c * t_r^beta_c; the integration deficit is Delta_r = P_r - M_r.
//! When Delta_r exceeds the condition threshold delta_c, the most recent
//! branch heads under r are consolidated into one merged claim and the
//! segment restarts at (t_r, M_r) = (0, 1), which prevents immediate
//! retriggering. Parameters (a_c, delta_c, beta_c) are calibrated per
//! condition class from baseline traces only.

mod calibrate;
mod controller;
mod evaluate;
mod runner;

pub use calibrate::{calibrate, calibrate_from_inputs, CalibrationInput};
pub use controller::{
    ConditionClass, DtiController, DtiParams, DtiParamsTable, RootState, TriggerDirective,
};
pub use evaluate::{evaluate_intervention, InterventionReport, SideSummary};
pub use runner::{run_with_dti, DeficitPoint, DtiReport, TriggerEvent};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DtiError {
    #[error("condition class `{class}` has {count} cascades; need at least 20")]
    InsufficientCascades { class: String, count: usize },
    #[error("degenerate baseline for `{class}`: {reason}")]
    DegenerateBaseline { class: String, reason: String },
    #[error("no calibrated parameters for condition class `{0}`")]
    MissingParams(String),
    #[error("event root `{0}` cannot be resolved")]
    UnknownRoot(String),
    #[error(transparent)]
    Sim(#[from] crate::sim::SimError),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}
