use std::collections::BTreeMap;

use crate::trace::{ClaimStatus, RunView};

use super::GraphError;

/// One claim in the reconstructed DAG. Depth and root id are recomputed from
/// lineage, never trusted from input.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimNode {
    pub claim_id: String,
    pub parent_claim_ids: Vec<String>,
    pub root_claim_id: String,
    pub claim_depth: u32,
    pub claim_status: ClaimStatus,
    pub agent_id: String,
    pub step_id: u64,
    /// Index of the creating record within the bundle.
    pub record_index: usize,
}

/// A maximal run of single-parent revisions. The anchor is the claim the
/// first revision was applied to; wave length counts the anchor too.
#[derive(Debug, Clone, PartialEq)]
pub struct RevisionChain {
    pub anchor: String,
    /// Revised claims in step order (anchor excluded).
    pub members: Vec<String>,
}

impl RevisionChain {
    /// Chain length in claims, anchor inclusive.
    pub fn wave_length(&self) -> u64 {
        self.members.len() as u64 + 1
    }
}

/// Contradictory claims sharing one parent within a temporal window.
#[derive(Debug, Clone, PartialEq)]
pub struct ContradictionGroup {
    pub parent: String,
    pub members: Vec<String>,
}

/// The claim DAG of one run, with derived groupings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClaimGraph {
    pub nodes: BTreeMap<String, ClaimNode>,
    /// Claim ids in creation (step) order.
    pub order: Vec<String>,
    /// Directed parent -> child pairs, in child creation order.
    pub edges: Vec<(String, String)>,
    /// Child ids per parent, in creation order.
    pub children: BTreeMap<String, Vec<String>>,
    pub revision_chains: Vec<RevisionChain>,
    pub revision_chain_id: BTreeMap<String, u32>,
    pub contradiction_groups: Vec<ContradictionGroup>,
    pub contradiction_group_id: BTreeMap<String, u32>,
    /// Merge claim id -> its parent list.
    pub merge_groups: BTreeMap<String, Vec<String>>,
    /// Non-fatal reconstruction notes (e.g. logged depth disagreeing with the
    /// recomputed one).
    pub diagnostics: Vec<String>,
}

/// Builds the claim DAG for one run: one node per claim-bearing event, edges
/// from every parent to the claim, depths and root ids propagated from the
/// earliest ancestor.
pub fn build_claim_graph(run: &RunView<'_>) -> Result<ClaimGraph, GraphError> {
    struct Raw<'a> {
        parents: &'a [String],
        status: ClaimStatus,
        agent: &'a str,
        step: u64,
        index: usize,
        logged_depth: Option<u64>,
    }

    let mut raw: BTreeMap<&str, Raw<'_>> = BTreeMap::new();
    let mut order: Vec<&str> = Vec::new();
    let mut diagnostics = Vec::new();

    for (&idx, r) in run.indices.iter().zip(run.records.iter()) {
        let Some(c) = &r.claim else { continue };
        if raw.contains_key(c.claim_id.as_str()) {
            diagnostics.push(format!("duplicate claim `{}` ignored", c.claim_id));
            continue;
        }
        raw.insert(
            c.claim_id.as_str(),
            Raw {
                parents: &c.parent_claim_ids,
                status: c.claim_status,
                agent: &r.agent_id,
                step: r.step_id,
                index: idx,
                logged_depth: c.extra.get("claim_depth").and_then(|v| v.as_u64()),
            },
        );
        order.push(c.claim_id.as_str());
    }

    // Resolve depth and root with an explicit stack; tricolor marking catches
    // lineage cycles even in unvalidated input.
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Gray,
        Black,
    }
    let mut marks: BTreeMap<&str, Mark> = raw.keys().map(|&k| (k, Mark::White)).collect();
    let mut resolved: BTreeMap<&str, (u32, &str)> = BTreeMap::new(); // depth, root

    for &start in &order {
        if marks[start] == Mark::Black {
            continue;
        }
        let mut stack = vec![start];
        while let Some(&id) = stack.last() {
            match marks[id] {
                Mark::Black => {
                    stack.pop();
                    continue;
                }
                Mark::White => {
                    marks.insert(id, Mark::Gray);
                }
                Mark::Gray => {}
            }
            let node = &raw[id];
            let mut pending = false;
            for p in node.parents {
                let p = p.as_str();
                match marks.get(p) {
                    None => return Err(GraphError::DanglingParent(p.to_string())),
                    Some(Mark::Gray) if stack.contains(&p) => {
                        return Err(GraphError::CycleError(p.to_string()))
                    }
                    Some(Mark::Black) => {}
                    Some(_) => {
                        stack.push(p);
                        pending = true;
                    }
                }
            }
            if pending {
                continue;
            }
            stack.pop();
            marks.insert(id, Mark::Black);
            if node.parents.is_empty() {
                resolved.insert(id, (0, id));
            } else {
                let depth = 1 + node
                    .parents
                    .iter()
                    .map(|p| resolved[p.as_str()].0)
                    .max()
                    .unwrap();
                // Root inherited from the earliest-created parent.
                let earliest = node
                    .parents
                    .iter()
                    .map(String::as_str)
                    .min_by_key(|p| (raw[p].step, *p))
                    .unwrap();
                let root = resolved[earliest].1;
                resolved.insert(id, (depth, root));
            }
        }
    }

    let mut graph = ClaimGraph::default();
    for &id in &order {
        let r = &raw[id];
        let (depth, root) = resolved[id];
        if let Some(logged) = r.logged_depth {
            if logged != depth as u64 {
                graph.diagnostics.push(format!(
                    "claim `{id}`: logged depth {logged} != recomputed {depth}"
                ));
            }
        }
        for p in r.parents {
            graph.edges.push((p.clone(), id.to_string()));
            graph
                .children
                .entry(p.clone())
                .or_default()
                .push(id.to_string());
        }
        if r.status == ClaimStatus::Merged {
            graph.merge_groups.insert(id.to_string(), r.parents.to_vec());
        }
        graph.order.push(id.to_string());
        graph.nodes.insert(
            id.to_string(),
            ClaimNode {
                claim_id: id.to_string(),
                parent_claim_ids: r.parents.to_vec(),
                root_claim_id: root.to_string(),
                claim_depth: depth,
                claim_status: r.status,
                agent_id: r.agent.to_string(),
                step_id: r.step,
                record_index: r.index,
            },
        );
    }
    graph.diagnostics.extend(diagnostics);
    Ok(graph)
}

/// Assigns the derived groupings over a built graph.
///
/// Revision chains follow the earliest revised child at branch points; later
/// siblings start fresh chains anchored at the same claim. Contradiction
/// groups collect same-parent contradictory claims whose steps fall within
/// `tau` of the group's first member.
pub fn derive_groupings(graph: &mut ClaimGraph, tau: u64) {
    graph.revision_chains.clear();
    graph.revision_chain_id.clear();
    graph.contradiction_groups.clear();
    graph.contradiction_group_id.clear();

    // Earliest revised child per parent continues the parent's chain.
    let mut first_revised_child: BTreeMap<&str, &str> = BTreeMap::new();
    for id in &graph.order {
        let node = &graph.nodes[id];
        if node.claim_status == ClaimStatus::Revised && node.parent_claim_ids.len() == 1 {
            first_revised_child
                .entry(node.parent_claim_ids[0].as_str())
                .or_insert(id.as_str());
        }
    }
    for id in &graph.order {
        let node = &graph.nodes[id];
        if node.claim_status != ClaimStatus::Revised || node.parent_claim_ids.len() != 1 {
            continue;
        }
        let parent = node.parent_claim_ids[0].as_str();
        let continues = graph
            .nodes
            .get(parent)
            .map(|p| p.claim_status == ClaimStatus::Revised && p.parent_claim_ids.len() == 1)
            .unwrap_or(false)
            && first_revised_child.get(parent) == Some(&id.as_str());
        if continues {
            let chain = graph.revision_chain_id[parent];
            graph.revision_chain_id.insert(id.clone(), chain);
            graph.revision_chains[chain as usize].members.push(id.clone());
        } else {
            let chain = graph.revision_chains.len() as u32;
            graph.revision_chains.push(RevisionChain {
                anchor: parent.to_string(),
                members: vec![id.clone()],
            });
            graph.revision_chain_id.insert(id.clone(), chain);
        }
    }

    // Contradiction groups, per parent, windowed from the first member.
    let mut by_parent: BTreeMap<String, Vec<(String, u64)>> = BTreeMap::new();
    for id in &graph.order {
        let node = &graph.nodes[id];
        if node.claim_status == ClaimStatus::Contradictory && node.parent_claim_ids.len() == 1 {
            by_parent
                .entry(node.parent_claim_ids[0].clone())
                .or_default()
                .push((id.clone(), node.step_id));
        }
    }
    for (parent, members) in by_parent {
        let mut window_start: Option<u64> = None;
        let mut current: Vec<String> = Vec::new();
        for (id, step) in members {
            let fits = window_start.map_or(false, |w0| step.saturating_sub(w0) <= tau);
            if !fits {
                if !current.is_empty() {
                    push_contradiction_group(graph, &parent, std::mem::take(&mut current));
                }
                window_start = Some(step);
            }
            current.push(id);
        }
        if !current.is_empty() {
            push_contradiction_group(graph, &parent, current);
        }
    }
}

fn push_contradiction_group(graph: &mut ClaimGraph, parent: &str, members: Vec<String>) {
    let gid = graph.contradiction_groups.len() as u32;
    for m in &members {
        graph.contradiction_group_id.insert(m.clone(), gid);
    }
    graph.contradiction_groups.push(ContradictionGroup {
        parent: parent.to_string(),
        members,
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::parse_trace;
    use std::io::Cursor;

    fn graph_of(lines: &[&str]) -> ClaimGraph {
        let joined = lines.join("\n");
        let bundle = parse_trace(Cursor::new(joined.into_bytes())).unwrap().bundle;
        let runs = bundle.runs();
        build_claim_graph(&runs[0]).unwrap()
    }

    #[test]
    fn single_proposal_is_its_own_root() {
        let g = graph_of(&[
            r#"{"run_id":"r","step_id":0,"agent_id":"a","event_type":"propose_claim","claim":{"claim_id":"c1","parent_claim_ids":[],"claim_status":"proposed"}}"#,
        ]);
        assert_eq!(g.nodes.len(), 1);
        assert_eq!(g.edges.len(), 0);
        let n = &g.nodes["c1"];
        assert_eq!(n.claim_depth, 0);
        assert_eq!(n.root_claim_id, "c1");
    }

    #[test]
    fn revision_chain_depths_follow_the_recursion() {
        let g = graph_of(&[
            r#"{"run_id":"r","step_id":0,"agent_id":"a","event_type":"propose_claim","claim":{"claim_id":"c1","parent_claim_ids":[],"claim_status":"proposed"}}"#,
            r#"{"run_id":"r","step_id":1,"agent_id":"a","event_type":"revise_claim","target_claim_id":"c1","claim":{"claim_id":"c2","parent_claim_ids":["c1"],"claim_status":"revised"}}"#,
            r#"{"run_id":"r","step_id":2,"agent_id":"a","event_type":"revise_claim","target_claim_id":"c2","claim":{"claim_id":"c3","parent_claim_ids":["c2"],"claim_status":"revised"}}"#,
            r#"{"run_id":"r","step_id":3,"agent_id":"a","event_type":"revise_claim","target_claim_id":"c3","claim":{"claim_id":"c4","parent_claim_ids":["c3"],"claim_status":"revised"}}"#,
        ]);
        let depths: Vec<u32> = ["c1", "c2", "c3", "c4"]
            .iter()
            .map(|c| g.nodes[*c].claim_depth)
            .collect();
        assert_eq!(depths, vec![0, 1, 2, 3]);
    }

    #[test]
    fn lineage_cycle_is_rejected() {
        // Forward references assemble a two-claim cycle.
        let g = graph_of; // silence unused warning pattern
        let _ = g;
        let lines = [
            r#"{"run_id":"r","step_id":0,"agent_id":"a","event_type":"revise_claim","target_claim_id":"cB","claim":{"claim_id":"cA","parent_claim_ids":["cB"],"claim_status":"revised"}}"#,
            r#"{"run_id":"r","step_id":1,"agent_id":"a","event_type":"revise_claim","target_claim_id":"cA","claim":{"claim_id":"cB","parent_claim_ids":["cA"],"claim_status":"revised"}}"#,
        ];
        let joined = lines.join("\n");
        let bundle = parse_trace(Cursor::new(joined.into_bytes())).unwrap().bundle;
        let runs = bundle.runs();
        assert!(matches!(
            build_claim_graph(&runs[0]),
            Err(GraphError::CycleError(_))
        ));
    }

    #[test]
    fn contradiction_window_splits_and_joins() {
        let lines = [
            r#"{"run_id":"r","step_id":0,"agent_id":"a","event_type":"propose_claim","claim":{"claim_id":"c1","parent_claim_ids":[],"claim_status":"proposed"}}"#,
            r#"{"run_id":"r","step_id":1,"agent_id":"b","event_type":"contradict_claim","target_claim_id":"c1","claim":{"claim_id":"x1","parent_claim_ids":["c1"],"claim_status":"contradictory"}}"#,
            r#"{"run_id":"r","step_id":100,"agent_id":"c","event_type":"contradict_claim","target_claim_id":"c1","claim":{"claim_id":"x2","parent_claim_ids":["c1"],"claim_status":"contradictory"}}"#,
        ];
        let joined = lines.join("\n");
        let bundle = parse_trace(Cursor::new(joined.into_bytes())).unwrap().bundle;
        let runs = bundle.runs();
        let mut g = build_claim_graph(&runs[0]).unwrap();

        derive_groupings(&mut g, 10);
        assert_eq!(g.contradiction_groups.len(), 2);

        derive_groupings(&mut g, 200);
        assert_eq!(g.contradiction_groups.len(), 1);
        assert_eq!(g.contradiction_groups[0].members.len(), 2);
    }
}
