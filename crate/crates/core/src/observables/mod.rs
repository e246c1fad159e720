//! Coordination observables over reconstructed structures.
//!
//! Event-size observables (one integer sample each): delegation cascade =
//! subtree size under a delegation, revision wave = chain length anchor
//! inclusive, contradiction burst = distinct contradicting agents on a shared
//! parent within the window, merge fan-in = in-degree of a merged claim, and
//! TCE = event count of a cascade. Concentration metrics (top-k shares, Gini,
//! effective agent count) are computed over per-agent claim counts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Cascade, ClaimGraph, SubtaskTree};
use crate::trace::{EventType, RunMeta, RunView, TaskFamily, Topology};

#[derive(Debug, Error)]
pub enum ObservablesError {
    #[error("no claims in run; concentration undefined")]
    InsufficientAgents,
}

/// The five primitive coordination observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    DelegationCascade,
    RevisionWave,
    ContradictionBurst,
    MergeFanin,
    Tce,
}

impl Observable {
    pub const ALL: [Observable; 5] = [
        Observable::DelegationCascade,
        Observable::RevisionWave,
        Observable::ContradictionBurst,
        Observable::MergeFanin,
        Observable::Tce,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Observable::DelegationCascade => "delegation_cascade",
            Observable::RevisionWave => "revision_wave",
            Observable::ContradictionBurst => "contradiction_burst",
            Observable::MergeFanin => "merge_fanin",
            Observable::Tce => "tce",
        }
    }
}

/// Condition labels a sample was observed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Condition {
    pub topology: Topology,
    pub task_family: TaskFamily,
    pub n: u32,
}

impl From<&RunMeta> for Condition {
    fn from(m: &RunMeta) -> Self {
        Condition {
            topology: m.topology,
            task_family: m.task_family,
            n: m.agent_count,
        }
    }
}

/// One event-size measurement (x >= 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSizeSample {
    pub observable: Observable,
    pub size: u64,
    pub run_id: String,
    pub condition: Condition,
}

/// Event-type composition of a cascade, as fractions summing to one over the
/// classified (non-proposal) events.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Composition {
    pub delegation: f64,
    pub revision: f64,
    pub contradiction: f64,
    pub merge: f64,
    pub endorsement: f64,
}

/// Per-cascade aggregates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeStats {
    pub root_claim_id: String,
    pub cascade_size: u64,
    pub tce: u64,
    /// None when the cascade holds no classified events (lone proposal).
    pub composition: Option<Composition>,
    /// Merge events over expansion events (delegation + contradiction +
    /// revision); None when the cascade has no expansion events.
    pub merge_conversion_ratio: Option<f64>,
}

pub fn delegation_cascade_sizes(
    tree: &SubtaskTree,
    run_id: &str,
    condition: Condition,
) -> Vec<EventSizeSample> {
    tree.delegation_events
        .iter()
        .map(|(_, subtask)| EventSizeSample {
            observable: Observable::DelegationCascade,
            size: tree.subtree_size(subtask),
            run_id: run_id.to_string(),
            condition,
        })
        .collect()
}

pub fn revision_waves(
    graph: &ClaimGraph,
    run_id: &str,
    condition: Condition,
) -> Vec<EventSizeSample> {
    graph
        .revision_chains
        .iter()
        .map(|chain| EventSizeSample {
            observable: Observable::RevisionWave,
            size: chain.wave_length(),
            run_id: run_id.to_string(),
            condition,
        })
        .collect()
}

/// Burst size counts distinct contradicting agents, not contradiction events.
pub fn contradiction_bursts(
    graph: &ClaimGraph,
    run_id: &str,
    condition: Condition,
) -> Vec<EventSizeSample> {
    graph
        .contradiction_groups
        .iter()
        .map(|group| {
            let mut agents: Vec<&str> = group
                .members
                .iter()
                .map(|m| graph.nodes[m].agent_id.as_str())
                .collect();
            agents.sort_unstable();
            agents.dedup();
            EventSizeSample {
                observable: Observable::ContradictionBurst,
                size: agents.len() as u64,
                run_id: run_id.to_string(),
                condition,
            }
        })
        .collect()
}

pub fn merge_fanins(
    graph: &ClaimGraph,
    run_id: &str,
    condition: Condition,
) -> Vec<EventSizeSample> {
    graph
        .merge_groups
        .values()
        .map(|parents| EventSizeSample {
            observable: Observable::MergeFanin,
            size: parents.len() as u64,
            run_id: run_id.to_string(),
            condition,
        })
        .collect()
}

pub fn tce_samples(
    cascades: &[Cascade],
    run_id: &str,
    condition: Condition,
) -> Vec<EventSizeSample> {
    cascades
        .iter()
        .map(|c| EventSizeSample {
            observable: Observable::Tce,
            size: c.tce(),
            run_id: run_id.to_string(),
            condition,
        })
        .collect()
}

/// Per-cascade TCE, composition, and merge conversion.
pub fn cascade_stats(cascades: &[Cascade], run: &RunView<'_>) -> Vec<CascadeStats> {
    let index_of: BTreeMap<usize, usize> = run
        .indices
        .iter()
        .enumerate()
        .map(|(pos, &idx)| (idx, pos))
        .collect();
    cascades
        .iter()
        .map(|c| {
            let mut counts = [0u64; 5]; // delegate, revise, contradict, merge, endorse
            for &idx in &c.member_event_indices {
                let r = run.records[index_of[&idx]];
                match r.event_type {
                    EventType::DelegateSubtask => counts[0] += 1,
                    EventType::ReviseClaim => counts[1] += 1,
                    EventType::ContradictClaim => counts[2] += 1,
                    EventType::MergeClaims => counts[3] += 1,
                    EventType::EndorseClaim => counts[4] += 1,
                    EventType::ProposeClaim => {}
                }
            }
            let classified: u64 = counts.iter().sum();
            let composition = (classified > 0).then(|| Composition {
                delegation: counts[0] as f64 / classified as f64,
                revision: counts[1] as f64 / classified as f64,
                contradiction: counts[2] as f64 / classified as f64,
                merge: counts[3] as f64 / classified as f64,
                endorsement: counts[4] as f64 / classified as f64,
            });
            let expansions = counts[0] + counts[1] + counts[2];
            let merge_conversion_ratio =
                (expansions > 0).then(|| counts[3] as f64 / expansions as f64);
            CascadeStats {
                root_claim_id: c.root_claim_id.clone(),
                cascade_size: c.size(),
                tce: c.tce(),
                composition,
                merge_conversion_ratio,
            }
        })
        .collect()
}

/// Effort distribution across agents for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    /// Claims produced per active agent.
    pub effort: BTreeMap<String, u64>,
    /// Top-k% effort share over active agents (k -> share). The marginal
    /// agent is included pro-rata so an egalitarian run scores exactly k/100.
    pub e_active: BTreeMap<u32, f64>,
    /// Top-k% effort share where the top set is k% of all N agents.
    pub e_all: BTreeMap<u32, f64>,
    /// `e_active[k] - k/100`.
    pub delta_active: BTreeMap<u32, f64>,
    pub gini: f64,
    /// N_eff / N with N_eff = 1 / sum of squared effort shares.
    pub n_eff_ratio: f64,
    /// Active agents over N.
    pub active_fraction: f64,
    pub n_agents: u32,
    pub active_agents: u32,
}

pub const CONCENTRATION_KS: [u32; 3] = [10, 25, 50];

impl ConcentrationReport {
    /// Share of total effort held by the top `k` agents (integer count),
    /// ties broken by lexicographic agent id.
    pub fn s_k(&self, k: usize) -> f64 {
        let sorted = self.sorted_efforts();
        let total: u64 = sorted.iter().map(|(_, e)| e).sum();
        let top: u64 = sorted.iter().take(k).map(|(_, e)| e).sum();
        top as f64 / total as f64
    }

    fn sorted_efforts(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self
            .effort
            .iter()
            .map(|(a, &e)| (a.as_str(), e))
            .collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        v
    }
}

/// Share captured by the top `count` (possibly fractional) entries of a
/// descending effort vector.
fn top_share(sorted_desc: &[u64], count: f64, total: u64) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let whole = count.floor() as usize;
    let frac = count - whole as f64;
    let mut sum: f64 = sorted_desc.iter().take(whole).map(|&e| e as f64).sum();
    if frac > 0.0 && whole < sorted_desc.len() {
        sum += frac * sorted_desc[whole] as f64;
    }
    sum / total as f64
}

/// Gini coefficient of an effort vector (0 = perfectly equal).
pub fn gini(efforts: &[u64]) -> f64 {
    let n = efforts.len();
    if n == 0 {
        return 0.0;
    }
    let total: u64 = efforts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let mut sorted = efforts.to_vec();
    sorted.sort_unstable();
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (2.0 * (i as f64 + 1.0) - n as f64 - 1.0) * x as f64)
        .sum();
    weighted / (n as f64 * total as f64)
}

/// Effective number of contributors: 1 / sum of squared shares.
pub fn n_eff(efforts: &[u64]) -> f64 {
    let total: u64 = efforts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let sum_sq: f64 = efforts
        .iter()
        .map(|&e| {
            let p = e as f64 / total as f64;
            p * p
        })
        .sum();
    1.0 / sum_sq
}

/// Computes the concentration report for one run. An agent is active when it
/// produced at least one claim.
pub fn concentration(run: &RunView<'_>) -> Result<ConcentrationReport, ObservablesError> {
    let mut effort: BTreeMap<String, u64> = BTreeMap::new();
    for r in &run.records {
        if r.claim.is_some() {
            *effort.entry(r.agent_id.clone()).or_insert(0) += 1;
        }
    }
    if effort.is_empty() {
        return Err(ObservablesError::InsufficientAgents);
    }
    let n = run.meta.agent_count.max(1);
    let active = effort.len() as u32;
    let mut sorted: Vec<u64> = effort.values().copied().collect();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let total: u64 = sorted.iter().sum();

    let mut e_active = BTreeMap::new();
    let mut e_all = BTreeMap::new();
    let mut delta_active = BTreeMap::new();
    for k in CONCENTRATION_KS {
        let frac = k as f64 / 100.0;
        let ea = top_share(&sorted, frac * active as f64, total);
        e_active.insert(k, ea);
        e_all.insert(k, top_share(&sorted, frac * n as f64, total));
        delta_active.insert(k, ea - frac);
    }

    Ok(ConcentrationReport {
        gini: gini(&sorted),
        n_eff_ratio: n_eff(&sorted) / n as f64,
        active_fraction: active as f64 / n as f64,
        n_agents: n,
        active_agents: active,
        e_active,
        e_all,
        delta_active,
        effort,
    })
}

/// Per-run maximum of an observable, keyed by agent count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremeSample {
    pub n: u32,
    pub observable: Observable,
    pub x_max: u64,
    pub run_id: String,
}

/// Groups samples by (run, observable) and keeps each group's maximum.
pub fn extreme_samples(samples: &[EventSizeSample]) -> Vec<ExtremeSample> {
    let mut max: BTreeMap<(&str, Observable), (u64, u32)> = BTreeMap::new();
    for s in samples {
        let entry = max
            .entry((s.run_id.as_str(), s.observable))
            .or_insert((0, s.condition.n));
        entry.0 = entry.0.max(s.size);
    }
    max.into_iter()
        .map(|((run_id, observable), (x_max, n))| ExtremeSample {
            n,
            observable,
            x_max,
            run_id: run_id.to_string(),
        })
        .collect()
}

/// All five observables for one reconstructed run.
pub fn collect_run_samples(
    run: &RunView<'_>,
    tree: &SubtaskTree,
    graph: &ClaimGraph,
    cascades: &[Cascade],
) -> Vec<EventSizeSample> {
    let condition = Condition::from(run.meta);
    let mut out = delegation_cascade_sizes(tree, run.run_id, condition);
    out.extend(revision_waves(graph, run.run_id, condition));
    out.extend(contradiction_bursts(graph, run.run_id, condition));
    out.extend(merge_fanins(graph, run.run_id, condition));
    out.extend(tce_samples(cascades, run.run_id, condition));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gini_matches_hand_values() {
        assert_eq!(gini(&[5, 5, 5, 5]), 0.0);
        assert!((gini(&[1, 3]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn n_eff_of_equal_efforts_is_the_count() {
        assert!((n_eff(&[2, 2, 2, 2]) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn top_share_interpolates_the_marginal_agent() {
        // 4 equal agents, top 50% -> exactly 0.5; top 10% -> 0.4 agents of 4.
        let sorted = [3u64, 3, 3, 3];
        assert!((top_share(&sorted, 2.0, 12) - 0.5).abs() < 1e-15);
        assert!((top_share(&sorted, 0.4, 12) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn extremes_group_by_run_and_observable() {
        let cond = Condition {
            topology: Topology::Chain,
            task_family: TaskFamily::Qa,
            n: 8,
        };
        let mk = |size, run: &str| EventSizeSample {
            observable: Observable::Tce,
            size,
            run_id: run.to_string(),
            condition: cond,
        };
        let samples = vec![mk(3, "r1"), mk(7, "r1"), mk(2, "r1"), mk(4, "r2")];
        let ex = extreme_samples(&samples);
        assert_eq!(ex.len(), 2);
        assert_eq!(ex.iter().find(|e| e.run_id == "r1").unwrap().x_max, 7);
        assert_eq!(ex.iter().find(|e| e.run_id == "r2").unwrap().x_max, 4);
    }
}
