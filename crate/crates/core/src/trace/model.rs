use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Coordination event types observed in traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventType {
    ProposeClaim,
    ReviseClaim,
    ContradictClaim,
    MergeClaims,
    DelegateSubtask,
    EndorseClaim,
}

impl EventType {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventType::ProposeClaim => "propose_claim",
            EventType::ReviseClaim => "revise_claim",
            EventType::ContradictClaim => "contradict_claim",
            EventType::MergeClaims => "merge_claims",
            EventType::DelegateSubtask => "delegate_subtask",
            EventType::EndorseClaim => "endorse_claim",
        }
    }
}

/// Lifecycle status of a claim, tied to its parent count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimStatus {
    Proposed,
    Revised,
    Contradictory,
    Merged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubtaskStatus {
    Active,
    Completed,
}

/// Communication topologies a run can be executed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Chain,
    Star,
    Tree,
    Hierarchical,
    FullyConnected,
    SparseMesh,
    DynamicReputation,
}

impl Topology {
    pub const ALL: [Topology; 7] = [
        Topology::Chain,
        Topology::Star,
        Topology::Tree,
        Topology::Hierarchical,
        Topology::FullyConnected,
        Topology::SparseMesh,
        Topology::DynamicReputation,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Topology::Chain => "chain",
            Topology::Star => "star",
            Topology::Tree => "tree",
            Topology::Hierarchical => "hierarchical",
            Topology::FullyConnected => "fully_connected",
            Topology::SparseMesh => "sparse_mesh",
            Topology::DynamicReputation => "dynamic_reputation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskFamily {
    Qa,
    Coding,
    Planning,
    Reasoning,
}

impl TaskFamily {
    pub const ALL: [TaskFamily; 4] = [
        TaskFamily::Qa,
        TaskFamily::Coding,
        TaskFamily::Planning,
        TaskFamily::Reasoning,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TaskFamily::Qa => "qa",
            TaskFamily::Coding => "coding",
            TaskFamily::Planning => "planning",
            TaskFamily::Reasoning => "reasoning",
        }
    }
}

/// Event time, accepted as integer ticks or an ISO-8601 string.
///
/// Never used for ordering; all ordering logic goes through `step_id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Timestamp {
    Ticks(u64),
    Iso(String),
}

impl Default for Timestamp {
    fn default() -> Self {
        Timestamp::Ticks(0)
    }
}

/// Claim fields embedded in a claim-bearing event.
///
/// Unknown extra keys (for example a logged `claim_depth`) are preserved on
/// round-trip but never read; depth and root id are always recomputed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimPayload {
    pub claim_id: String,
    #[serde(default)]
    pub parent_claim_ids: Vec<String>,
    pub claim_status: ClaimStatus,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

/// Subtask fields embedded in a delegation event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubtaskPayload {
    pub subtask_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_subtask_id: Option<String>,
    pub assigned_agent: String,
    pub subtask_status: SubtaskStatus,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

/// One coordination step as logged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub run_id: String,
    pub step_id: u64,
    pub agent_id: String,
    pub event_type: EventType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_claim_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_subtask_id: Option<String>,
    #[serde(default)]
    pub timestamp: Timestamp,
    #[serde(default)]
    pub message_length: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claim: Option<ClaimPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtask: Option<SubtaskPayload>,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl EventRecord {
    /// Claim ids this record references (target plus any claim parents),
    /// deduplicated, in reference order.
    pub fn referenced_claims(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        if let Some(t) = &self.target_claim_id {
            out.push(t.as_str());
        }
        if let Some(c) = &self.claim {
            for p in &c.parent_claim_ids {
                if !out.contains(&p.as_str()) {
                    out.push(p.as_str());
                }
            }
        }
        out
    }
}

/// Per-run condition labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub agent_count: u32,
    pub topology: Topology,
    pub task_family: TaskFamily,
    pub seed: i64,
    /// True when the meta entry was synthesized (no `run_meta` line present).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub synthesized: bool,
}

/// Parsed trace: records in input order plus per-run condition labels.
///
/// Immutable after construction and safe to share read-only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceBundle {
    pub records: Vec<EventRecord>,
    pub run_meta: BTreeMap<String, RunMeta>,
}

/// Borrowed view of a single run inside a bundle.
#[derive(Debug, Clone)]
pub struct RunView<'a> {
    pub run_id: &'a str,
    pub meta: &'a RunMeta,
    /// Indices into `TraceBundle::records`, in input order.
    pub indices: Vec<usize>,
    pub records: Vec<&'a EventRecord>,
}

impl TraceBundle {
    /// Splits the bundle into per-run views, in order of first appearance.
    pub fn runs(&self) -> Vec<RunView<'_>> {
        let mut order: Vec<&str> = Vec::new();
        let mut by_run: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.records.iter().enumerate() {
            let e = by_run.entry(r.run_id.as_str()).or_insert_with(|| {
                order.push(r.run_id.as_str());
                Vec::new()
            });
            e.push(i);
        }
        order
            .into_iter()
            .map(|run_id| {
                let indices = by_run.remove(run_id).unwrap_or_default();
                let records = indices.iter().map(|&i| &self.records[i]).collect();
                RunView {
                    run_id,
                    meta: &self.run_meta[run_id],
                    indices,
                    records,
                }
            })
            .collect()
    }
}
