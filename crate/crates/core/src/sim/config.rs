use serde::{Deserialize, Serialize};

use crate::trace::{TaskFamily, Topology};

use super::workload::WorkloadConfig;
use super::SimError;

/// Probabilities of the five drawable event types, summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventMix {
    pub delegate: f64,
    pub revise: f64,
    pub contradict: f64,
    pub merge: f64,
    pub endorse: f64,
}

impl Default for EventMix {
    fn default() -> Self {
        // Calibrated so baseline merge conversion lands near the reported
        // median composition band.
        EventMix {
            delegate: 0.25,
            revise: 0.30,
            contradict: 0.25,
            merge: 0.15,
            endorse: 0.05,
        }
    }
}

impl EventMix {
    pub fn sum(&self) -> f64 {
        self.delegate + self.revise + self.contradict + self.merge + self.endorse
    }
}

/// Full configuration of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: u32,
    pub topology: Topology,
    pub task_family: TaskFamily,
    /// Reinforcement strength of the routing rule.
    pub beta: f64,
    /// Expected new claims per selected claim.
    pub lambda: f64,
    #[serde(default)]
    pub event_mix: EventMix,
    /// Scheduling turns (one routing decision each).
    pub max_steps: u64,
    pub max_depth: u32,
    /// Total emitted-event cap; the finite-constraint cutoff.
    pub context_budget: u64,
    pub seed: u64,
    #[serde(default)]
    pub workload: WorkloadConfig,
}

impl SimConfig {
    /// Defaults: beta 0.15, lambda 1, the standard mix, 24N turns capped by a
    /// 30N event budget, depth cap 64.
    pub fn defaults(n: u32, topology: Topology, task_family: TaskFamily, seed: u64) -> Self {
        SimConfig {
            n,
            topology,
            task_family,
            beta: 0.15,
            lambda: 1.0,
            event_mix: EventMix::default(),
            max_steps: 24 * n as u64,
            max_depth: 64,
            context_budget: 30 * n as u64,
            seed,
            workload: WorkloadConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.n < 2 {
            return Err(SimError::InvalidN(self.n));
        }
        if (self.event_mix.sum() - 1.0).abs() > 1e-12 {
            return Err(SimError::ConfigError(format!(
                "event_mix sums to {}, expected 1",
                self.event_mix.sum()
            )));
        }
        if !(self.lambda > 0.0) {
            return Err(SimError::ConfigError("lambda must be > 0".into()));
        }
        if self.beta < 0.0 {
            return Err(SimError::ConfigError("beta must be >= 0".into()));
        }
        if self.max_steps == 0 || self.context_budget == 0 || self.max_depth == 0 {
            return Err(SimError::ConfigError(
                "max_steps, context_budget, max_depth must be positive".into(),
            ));
        }
        self.workload.validate().map_err(SimError::ConfigError)
    }

    pub fn run_id(&self) -> String {
        format!(
            "{}-{}-n{}-seed{}",
            self.topology.as_str(),
            self.task_family.as_str(),
            self.n,
            self.seed
        )
    }
}
