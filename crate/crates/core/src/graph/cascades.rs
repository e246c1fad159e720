use std::collections::BTreeMap;

use crate::trace::RunView;

use super::ClaimGraph;

/// All claims sharing one root, plus the events attached to them.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade {
    pub root_claim_id: String,
    /// Member claims in creation order.
    pub member_claim_ids: Vec<String>,
    /// Bundle record indices of events in this cascade. Claim-creating events
    /// attach via the claim they create; claim-less events via their target.
    pub member_event_indices: Vec<usize>,
}

impl Cascade {
    pub fn size(&self) -> u64 {
        self.member_claim_ids.len() as u64
    }

    /// Total cognitive effort: the event count of the cascade.
    pub fn tce(&self) -> u64 {
        self.member_event_indices.len() as u64
    }
}

/// Partitions the claim DAG into root-indexed cascades and attaches events.
/// Every claim lands in exactly one cascade (its `root_claim_id`).
pub fn extract_cascades(graph: &ClaimGraph, run: &RunView<'_>) -> Vec<Cascade> {
    let mut roots: Vec<&str> = Vec::new();
    let mut members: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for id in &graph.order {
        let node = &graph.nodes[id];
        if node.claim_depth == 0 {
            roots.push(id.as_str());
        }
        members
            .entry(node.root_claim_id.as_str())
            .or_default()
            .push(id.clone());
    }

    let mut events: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (&idx, r) in run.indices.iter().zip(run.records.iter()) {
        // Claim-creating events belong to the cascade of the claim they
        // create; others fall back to the target's cascade.
        let root = if let Some(c) = &r.claim {
            graph.nodes.get(&c.claim_id).map(|n| n.root_claim_id.as_str())
        } else if let Some(t) = &r.target_claim_id {
            graph.nodes.get(t).map(|n| n.root_claim_id.as_str())
        } else {
            None
        };
        if let Some(root) = root {
            events.entry(root).or_default().push(idx);
        }
    }

    roots
        .into_iter()
        .map(|root| Cascade {
            root_claim_id: root.to_string(),
            member_claim_ids: members.remove(root).unwrap_or_default(),
            member_event_indices: events.remove(root).unwrap_or_default(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_claim_graph;
    use crate::trace::parse_trace;
    use std::io::Cursor;

    #[test]
    fn isolated_roots_form_singleton_cascades() {
        let lines = [
            r#"{"run_id":"r","step_id":0,"agent_id":"a","event_type":"propose_claim","claim":{"claim_id":"c1","parent_claim_ids":[],"claim_status":"proposed"}}"#,
            r#"{"run_id":"r","step_id":1,"agent_id":"b","event_type":"propose_claim","claim":{"claim_id":"c2","parent_claim_ids":[],"claim_status":"proposed"}}"#,
        ];
        let bundle = parse_trace(Cursor::new(lines.join("\n").into_bytes()))
            .unwrap()
            .bundle;
        let runs = bundle.runs();
        let graph = build_claim_graph(&runs[0]).unwrap();
        let cascades = extract_cascades(&graph, &runs[0]);
        assert_eq!(cascades.len(), 2);
        assert!(cascades.iter().all(|c| c.size() == 1 && c.tce() == 1));
    }

    #[test]
    fn merge_joining_two_roots_goes_to_the_earlier_root() {
        let lines = [
            r#"{"run_id":"r","step_id":0,"agent_id":"a","event_type":"propose_claim","claim":{"claim_id":"r1","parent_claim_ids":[],"claim_status":"proposed"}}"#,
            r#"{"run_id":"r","step_id":1,"agent_id":"b","event_type":"propose_claim","claim":{"claim_id":"r2","parent_claim_ids":[],"claim_status":"proposed"}}"#,
            r#"{"run_id":"r","step_id":2,"agent_id":"c","event_type":"merge_claims","target_claim_id":"r1","claim":{"claim_id":"m","parent_claim_ids":["r2","r1"],"claim_status":"merged"}}"#,
        ];
        let bundle = parse_trace(Cursor::new(lines.join("\n").into_bytes()))
            .unwrap()
            .bundle;
        let runs = bundle.runs();
        let graph = build_claim_graph(&runs[0]).unwrap();
        assert_eq!(graph.nodes["m"].root_claim_id, "r1");
        let cascades = extract_cascades(&graph, &runs[0]);
        let c1 = cascades.iter().find(|c| c.root_claim_id == "r1").unwrap();
        assert_eq!(c1.size(), 2);
        let c2 = cascades.iter().find(|c| c.root_claim_id == "r2").unwrap();
        assert_eq!(c2.size(), 1);
    }
}
