use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::trace::{TaskFamily, Topology};

/// Branch heads kept per segment; also the fan-in cap of injected merges.
pub const BRANCH_HEAD_CAP: usize = 8;

/// Calibrated controller parameters for one condition class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtiParams {
    /// Pressure normalization, > 0.
    pub a_c: f64,
    /// Deficit threshold; may be +inf to disable the controller.
    #[serde(with = "inf_f64")]
    pub delta_c: f64,
    /// Contradiction scaling exponent, > 0.
    pub beta_c_hat: f64,
}

/// JSON has no infinity literal; non-finite thresholds round-trip as strings.
mod inf_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Str(s) => match s.as_str() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                other => other.parse().map_err(serde::de::Error::custom),
            },
        }
    }
}

/// (topology, task family) pair parameters are calibrated over, optionally
/// stratified by agent count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConditionClass {
    pub topology: Topology,
    pub task_family: TaskFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
}

impl ConditionClass {
    pub fn key(&self) -> String {
        match self.n {
            Some(n) => format!("{}|{}|n{}", self.topology.as_str(), self.task_family.as_str(), n),
            None => format!("{}|{}", self.topology.as_str(), self.task_family.as_str()),
        }
    }
}

/// Calibrated parameters keyed by condition class.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DtiParamsTable {
    pub classes: BTreeMap<String, DtiParams>,
    /// True when calibration pooled across N (the default).
    pub pooled_n: bool,
}

impl DtiParamsTable {
    /// Looks up the class, trying the N-stratified key first.
    pub fn lookup(&self, topology: Topology, task_family: TaskFamily, n: u32) -> Option<DtiParams> {
        let strat = ConditionClass {
            topology,
            task_family,
            n: Some(n),
        };
        let pooled = ConditionClass {
            topology,
            task_family,
            n: None,
        };
        self.classes
            .get(&strat.key())
            .or_else(|| self.classes.get(&pooled.key()))
            .copied()
    }
}

/// Per-root running state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RootState {
    /// Events elapsed in the current segment.
    pub t_r: u64,
    /// Realized merges in the current segment.
    pub m_r: u64,
    pub last_trigger_step: Option<u64>,
    /// Most recent branch heads of the segment (capped).
    segment_leaves: Vec<String>,
}

/// Instruction to consolidate the listed branch heads under `root`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriggerDirective {
    pub root: String,
    pub branch_heads: Vec<String>,
    pub deficit: f64,
    pub step: u64,
}

/// Sequential controller for one run. Memory is O(active roots): per root a
/// pair of counters and at most [`BRANCH_HEAD_CAP`] leaf ids.
#[derive(Debug)]
pub struct DtiController {
    params: DtiParams,
    states: BTreeMap<String, RootState>,
    /// (root, step, deficit) per observed event, kept when enabled.
    pub deficit_log: Vec<(String, u64, f64)>,
    pub log_deficits: bool,
}

impl DtiController {
    pub fn new(params: DtiParams) -> Self {
        DtiController {
            params,
            states: BTreeMap::new(),
            deficit_log: Vec::new(),
            log_deficits: false,
        }
    }

    pub fn state(&self, root: &str) -> Option<&RootState> {
        self.states.get(root)
    }

    pub fn active_roots(&self) -> usize {
        self.states.len()
    }

    /// Observes one event of cascade `root`. `created_claim` carries the id
    /// and parent ids when the event created a claim. Returns a directive
    /// when the deficit crosses the threshold and at least two branch heads
    /// exist to merge; the reset to (t_r, M_r) = (0, 1) happens here, so a
    /// returned directive always leaves the segment restarted.
    pub fn step(
        &mut self,
        root: &str,
        is_merge: bool,
        created_claim: Option<(&str, &[String])>,
        step: u64,
    ) -> Option<TriggerDirective> {
        let state = self.states.entry(root.to_string()).or_default();
        state.t_r += 1;
        if is_merge {
            state.m_r += 1;
        }
        if let Some((id, parents)) = created_claim {
            state.segment_leaves.retain(|l| !parents.contains(l));
            state.segment_leaves.push(id.to_string());
            if state.segment_leaves.len() > BRANCH_HEAD_CAP {
                state.segment_leaves.remove(0);
            }
        }
        let pressure = self.params.a_c * (state.t_r as f64).powf(self.params.beta_c_hat);
        let deficit = pressure - state.m_r as f64;
        if self.log_deficits {
            self.deficit_log.push((root.to_string(), step, deficit));
        }
        if deficit > self.params.delta_c && state.segment_leaves.len() >= 2 {
            let branch_heads = state.segment_leaves.clone();
            state.t_r = 0;
            state.m_r = 1;
            state.last_trigger_step = Some(step);
            state.segment_leaves.clear();
            return Some(TriggerDirective {
                root: root.to_string(),
                branch_heads,
                deficit,
                step,
            });
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a_c: f64, delta_c: f64, beta_c: f64) -> DtiParams {
        DtiParams {
            a_c,
            delta_c,
            beta_c_hat: beta_c,
        }
    }

    /// a_c=1, beta=1, delta=2: deficits 1,2,3 over three merge-free events;
    /// the trigger lands on the third.
    #[test]
    fn hand_evaluated_recurrence_triggers_at_t3() {
        let mut ctl = DtiController::new(params(1.0, 2.0, 1.0));
        let parents: Vec<String> = vec![];
        assert!(ctl.step("r", false, Some(("b1", &parents)), 1).is_none());
        assert!(ctl.step("r", false, Some(("b2", &parents)), 2).is_none());
        let d = ctl.step("r", false, Some(("b3", &parents)), 3).unwrap();
        assert_eq!(d.deficit, 3.0);
        let s = ctl.state("r").unwrap();
        assert_eq!((s.t_r, s.m_r), (0, 1));
    }

    /// Same run with a merge at t=2: deficits 1,1,2 and no trigger by t=3.
    #[test]
    fn merge_absorbs_the_deficit() {
        let mut ctl = DtiController::new(params(1.0, 2.0, 1.0));
        let parents: Vec<String> = vec![];
        assert!(ctl.step("r", false, Some(("b1", &parents)), 1).is_none());
        assert!(ctl.step("r", true, Some(("b2", &parents)), 2).is_none());
        assert!(ctl.step("r", false, Some(("b3", &parents)), 3).is_none());
    }

    #[test]
    fn infinite_threshold_never_triggers() {
        let mut ctl = DtiController::new(params(1.0, f64::INFINITY, 1.0));
        let parents: Vec<String> = vec![];
        for step in 0..10_000u64 {
            assert!(ctl
                .step("r", false, Some((&format!("b{step}"), &parents)), step)
                .is_none());
        }
        assert_eq!(ctl.state("r").unwrap().t_r, 10_000);
    }

    #[test]
    fn params_with_infinite_threshold_round_trip_as_json() {
        let p = params(0.5, f64::INFINITY, 0.9);
        let json = serde_json::to_string(&p).unwrap();
        let back: DtiParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back.delta_c, f64::INFINITY);
        assert_eq!(back.a_c, 0.5);
    }

    #[test]
    fn controller_state_is_per_root() {
        let mut ctl = DtiController::new(params(1.0, 5.0, 1.0));
        let parents: Vec<String> = vec![];
        ctl.step("r1", false, Some(("a", &parents)), 1);
        ctl.step("r2", false, Some(("b", &parents)), 2);
        ctl.step("r1", false, Some(("c", &parents)), 3);
        assert_eq!(ctl.state("r1").unwrap().t_r, 2);
        assert_eq!(ctl.state("r2").unwrap().t_r, 1);
    }
}
