use std::collections::BTreeMap;

use crate::trace::{EventType, RunView, SubtaskStatus};

use super::GraphError;

#[derive(Debug, Clone, PartialEq)]
pub struct SubtaskNode {
    pub subtask_id: String,
    pub parent_subtask_id: Option<String>,
    pub subtask_depth: u32,
    pub assigned_agent: String,
    pub subtask_status: SubtaskStatus,
    /// False for implicit nodes promoted from orphan parent references.
    pub declared: bool,
}

/// The delegation hierarchy of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SubtaskTree {
    pub nodes: BTreeMap<String, SubtaskNode>,
    pub children: BTreeMap<String, Vec<String>>,
    pub roots: Vec<String>,
    /// (record index, subtask id) per delegation event, in step order.
    pub delegation_events: Vec<(usize, String)>,
    pub diagnostics: Vec<String>,
}

impl SubtaskTree {
    /// Node count of the subtree rooted at `id`, root inclusive.
    pub fn subtree_size(&self, id: &str) -> u64 {
        let mut count = 0;
        let mut stack = vec![id];
        while let Some(cur) = stack.pop() {
            count += 1;
            if let Some(kids) = self.children.get(cur) {
                stack.extend(kids.iter().map(String::as_str));
            }
        }
        count
    }
}

/// Builds the subtask tree from delegation events: one node per declared
/// subtask, edges parent -> child. Orphan parent references are promoted to
/// implicit roots with a diagnostic; parent cycles are rejected.
pub fn build_subtask_tree(run: &RunView<'_>) -> Result<SubtaskTree, GraphError> {
    let mut tree = SubtaskTree::default();

    for (&idx, r) in run.indices.iter().zip(run.records.iter()) {
        if r.event_type != EventType::DelegateSubtask {
            continue;
        }
        let Some(s) = &r.subtask else { continue };
        if tree.nodes.contains_key(&s.subtask_id) {
            tree.diagnostics
                .push(format!("duplicate subtask `{}` ignored", s.subtask_id));
            continue;
        }
        tree.delegation_events.push((idx, s.subtask_id.clone()));
        tree.nodes.insert(
            s.subtask_id.clone(),
            SubtaskNode {
                subtask_id: s.subtask_id.clone(),
                parent_subtask_id: s.parent_subtask_id.clone(),
                subtask_depth: 0,
                assigned_agent: s.assigned_agent.clone(),
                subtask_status: s.subtask_status,
                declared: true,
            },
        );
    }

    // Promote orphan parents to implicit roots.
    let orphan_parents: Vec<String> = tree
        .nodes
        .values()
        .filter_map(|n| n.parent_subtask_id.clone())
        .filter(|p| !tree.nodes.contains_key(p))
        .collect();
    for p in orphan_parents {
        if tree.nodes.contains_key(&p) {
            continue;
        }
        tree.diagnostics
            .push(format!("orphan parent `{p}` promoted to implicit root"));
        tree.nodes.insert(
            p.clone(),
            SubtaskNode {
                subtask_id: p.clone(),
                parent_subtask_id: None,
                subtask_depth: 0,
                assigned_agent: String::new(),
                subtask_status: SubtaskStatus::Active,
                declared: false,
            },
        );
    }

    for n in tree.nodes.values() {
        match &n.parent_subtask_id {
            Some(p) => tree
                .children
                .entry(p.clone())
                .or_default()
                .push(n.subtask_id.clone()),
            None => tree.roots.push(n.subtask_id.clone()),
        }
    }
    for kids in tree.children.values_mut() {
        kids.sort();
    }
    tree.roots.sort();

    // Depth by BFS from roots; anything unreached sits on a parent cycle.
    let mut depth: BTreeMap<&str, u32> = BTreeMap::new();
    let mut queue: std::collections::VecDeque<&str> =
        tree.roots.iter().map(String::as_str).collect();
    for r in &tree.roots {
        depth.insert(r.as_str(), 0);
    }
    while let Some(cur) = queue.pop_front() {
        let d = depth[cur];
        if let Some(kids) = tree.children.get(cur) {
            for k in kids {
                depth.insert(k.as_str(), d + 1);
                queue.push_back(k.as_str());
            }
        }
    }
    if depth.len() != tree.nodes.len() {
        let stuck = tree
            .nodes
            .keys()
            .find(|k| !depth.contains_key(k.as_str()))
            .cloned()
            .unwrap_or_default();
        return Err(GraphError::CycleError(stuck));
    }
    let depths: Vec<(String, u32)> = depth.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (id, d) in depths {
        tree.nodes.get_mut(&id).unwrap().subtask_depth = d;
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::parse_trace;
    use std::io::Cursor;

    fn tree_of(lines: &[&str]) -> Result<SubtaskTree, GraphError> {
        let joined = lines.join("\n");
        let bundle = parse_trace(Cursor::new(joined.into_bytes())).unwrap().bundle;
        let runs = bundle.runs();
        build_subtask_tree(&runs[0])
    }

    fn delegate(step: u64, id: &str, parent: Option<&str>) -> String {
        let parent = match parent {
            Some(p) => format!(r#","parent_subtask_id":"{p}""#),
            None => String::new(),
        };
        format!(
            r#"{{"run_id":"r","step_id":{step},"agent_id":"a","event_type":"delegate_subtask","subtask":{{"subtask_id":"{id}"{parent},"assigned_agent":"b","subtask_status":"active"}}}}"#
        )
    }

    #[test]
    fn zero_delegations_make_an_empty_tree() {
        let t = tree_of(&[
            r#"{"run_id":"r","step_id":0,"agent_id":"a","event_type":"propose_claim","claim":{"claim_id":"c1","parent_claim_ids":[],"claim_status":"proposed"}}"#,
        ])
        .unwrap();
        assert!(t.nodes.is_empty());
        assert!(t.delegation_events.is_empty());
    }

    #[test]
    fn parent_cycle_is_rejected() {
        let a = delegate(0, "A", Some("B"));
        let b = delegate(1, "B", Some("A"));
        let err = tree_of(&[a.as_str(), b.as_str()]).unwrap_err();
        assert!(matches!(err, GraphError::CycleError(_)));
    }

    #[test]
    fn worked_delegation_tree_has_expected_shape() {
        let lines: Vec<String> = vec![
            delegate(0, "T0", None),
            delegate(1, "T1", Some("T0")),
            delegate(2, "T2", Some("T0")),
            delegate(3, "T3", Some("T1")),
            delegate(4, "T4", Some("T1")),
            delegate(5, "T5", Some("T2")),
        ];
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let t = tree_of(&refs).unwrap();
        assert_eq!(t.roots, vec!["T0".to_string()]);
        assert_eq!(t.subtree_size("T0"), 6);
        assert_eq!(t.subtree_size("T1"), 3);
        assert_eq!(t.nodes["T5"].subtask_depth, 2);
    }
}
