use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::model::{ClaimStatus, EventRecord, EventType, TraceBundle};

/// Structural violation classes. Violations are data, not failures: a report
/// listing them is still a successful validation pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NonMonotoneStep,
    MissingTarget,
    MergeParentCount,
    MissingSubtaskPayload,
    SelfParent,
    StatusParentMismatch,
    DuplicateClaim,
    UndefinedClaimRef,
    SubtaskSelfParent,
    DuplicateSubtask,
    /// Subtask reference with no declaring delegation. Reported as a warning:
    /// downstream construction promotes such parents to roots.
    UndefinedSubtaskRef,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub run_id: String,
    /// Index of the offending record within the bundle.
    pub record_index: usize,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    /// Non-fatal oddities (e.g. orphan subtask parents).
    pub warnings: Vec<Violation>,
    pub records: usize,
    pub runs: usize,
}

/// Checks every record against the schema invariants: step monotonicity,
/// target/payload requirements per event type, claim status vs. parent count,
/// self-parent claims, duplicate ids, and references to claims that were never
/// defined at an earlier step of the same run.
pub fn validate_bundle(bundle: &TraceBundle) -> ValidationReport {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();

    for run in bundle.runs() {
        let mut last_step: Option<u64> = None;
        let mut claims_defined: BTreeSet<&str> = BTreeSet::new();
        let mut subtasks_defined: BTreeSet<&str> = BTreeSet::new();
        // First pass collects declared subtasks so later targets of earlier
        // delegations do not warn; claim references stay strictly temporal.
        let mut all_subtasks: BTreeSet<&str> = BTreeSet::new();
        for r in &run.records {
            if let Some(s) = &r.subtask {
                all_subtasks.insert(s.subtask_id.as_str());
            }
        }
        let mut claim_count: BTreeMap<&str, usize> = BTreeMap::new();

        for (&idx, r) in run.indices.iter().zip(run.records.iter()) {
            let mut push = |kind, message: String| {
                violations.push(Violation {
                    kind,
                    run_id: run.run_id.to_string(),
                    record_index: idx,
                    message,
                });
            };

            if let Some(prev) = last_step {
                if r.step_id <= prev {
                    push(
                        ViolationKind::NonMonotoneStep,
                        format!("step_id {} follows {}", r.step_id, prev),
                    );
                }
            }
            last_step = Some(r.step_id);

            check_event_shape(r, &mut push);
            check_claim_payload(r, &mut push);

            // Referential integrity: claims must exist at an earlier step.
            for referenced in r.referenced_claims() {
                if !claims_defined.contains(referenced) {
                    push(
                        ViolationKind::UndefinedClaimRef,
                        format!("claim `{referenced}` referenced before definition"),
                    );
                }
            }

            if let Some(c) = &r.claim {
                let n = claim_count.entry(c.claim_id.as_str()).or_insert(0);
                *n += 1;
                if *n > 1 {
                    push(
                        ViolationKind::DuplicateClaim,
                        format!("claim `{}` defined more than once", c.claim_id),
                    );
                }
                claims_defined.insert(c.claim_id.as_str());
            }

            if let Some(s) = &r.subtask {
                if Some(&s.subtask_id) == s.parent_subtask_id.as_ref() {
                    push(
                        ViolationKind::SubtaskSelfParent,
                        format!("subtask `{}` is its own parent", s.subtask_id),
                    );
                }
                if !subtasks_defined.insert(s.subtask_id.as_str()) {
                    push(
                        ViolationKind::DuplicateSubtask,
                        format!("subtask `{}` declared more than once", s.subtask_id),
                    );
                }
                if let Some(p) = &s.parent_subtask_id {
                    if !all_subtasks.contains(p.as_str()) {
                        warnings.push(Violation {
                            kind: ViolationKind::UndefinedSubtaskRef,
                            run_id: run.run_id.to_string(),
                            record_index: idx,
                            message: format!("parent subtask `{p}` never declared; promoted to root"),
                        });
                    }
                }
            }
            if let Some(t) = &r.target_subtask_id {
                if !all_subtasks.contains(t.as_str()) {
                    warnings.push(Violation {
                        kind: ViolationKind::UndefinedSubtaskRef,
                        run_id: run.run_id.to_string(),
                        record_index: idx,
                        message: format!("target subtask `{t}` never declared"),
                    });
                }
            }
        }
    }

    ValidationReport {
        ok: violations.is_empty(),
        records: bundle.records.len(),
        runs: bundle.run_meta.len(),
        violations,
        warnings,
    }
}

fn check_event_shape(r: &EventRecord, push: &mut impl FnMut(ViolationKind, String)) {
    match r.event_type {
        EventType::ReviseClaim | EventType::ContradictClaim | EventType::EndorseClaim => {
            if r.target_claim_id.as_deref().map_or(true, str::is_empty) {
                push(
                    ViolationKind::MissingTarget,
                    format!("{} requires a non-empty target_claim_id", r.event_type.as_str()),
                );
            }
        }
        EventType::MergeClaims => {
            let parents = r.claim.as_ref().map_or(0, |c| c.parent_claim_ids.len());
            if parents < 2 {
                push(
                    ViolationKind::MergeParentCount,
                    format!("merge_claims carries {parents} parent ids; needs at least 2"),
                );
            }
        }
        EventType::DelegateSubtask => {
            if r.subtask.is_none() {
                push(
                    ViolationKind::MissingSubtaskPayload,
                    "delegate_subtask requires a subtask payload".into(),
                );
            }
        }
        EventType::ProposeClaim => {}
    }
}

fn check_claim_payload(r: &EventRecord, push: &mut impl FnMut(ViolationKind, String)) {
    let Some(c) = &r.claim else { return };
    if c.parent_claim_ids.iter().any(|p| p == &c.claim_id) {
        push(
            ViolationKind::SelfParent,
            format!("claim `{}` lists itself as parent", c.claim_id),
        );
    }
    let n = c.parent_claim_ids.len();
    let ok = match c.claim_status {
        ClaimStatus::Proposed => n == 0,
        ClaimStatus::Revised | ClaimStatus::Contradictory => n == 1,
        ClaimStatus::Merged => n >= 2,
    };
    if !ok {
        push(
            ViolationKind::StatusParentMismatch,
            format!(
                "claim `{}` has status {:?} with {} parents",
                c.claim_id, c.claim_status, n
            ),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::parse_trace;
    use std::io::Cursor;

    fn bundle_of(lines: &[&str]) -> TraceBundle {
        let joined = lines.join("\n");
        parse_trace(Cursor::new(joined.into_bytes())).unwrap().bundle
    }

    #[test]
    fn self_parent_claim_is_flagged() {
        let b = bundle_of(&[
            r#"{"run_id":"r","step_id":0,"agent_id":"a","event_type":"propose_claim","claim":{"claim_id":"c1","parent_claim_ids":[],"claim_status":"proposed"}}"#,
            r#"{"run_id":"r","step_id":1,"agent_id":"a","event_type":"revise_claim","target_claim_id":"c2","claim":{"claim_id":"c2","parent_claim_ids":["c2"],"claim_status":"revised"}}"#,
        ]);
        let report = validate_bundle(&b);
        assert!(!report.ok);
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::SelfParent));
    }

    #[test]
    fn merge_with_unknown_parent_is_a_dangling_reference() {
        let b = bundle_of(&[
            r#"{"run_id":"r","step_id":0,"agent_id":"a","event_type":"propose_claim","claim":{"claim_id":"c1","parent_claim_ids":[],"claim_status":"proposed"}}"#,
            r#"{"run_id":"r","step_id":1,"agent_id":"a","event_type":"merge_claims","claim":{"claim_id":"c2","parent_claim_ids":["c1","ghost"],"claim_status":"merged"}}"#,
        ]);
        let report = validate_bundle(&b);
        assert!(!report.ok);
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::UndefinedClaimRef && v.message.contains("ghost")));
    }

    #[test]
    fn non_monotone_steps_are_flagged() {
        let b = bundle_of(&[
            r#"{"run_id":"r","step_id":5,"agent_id":"a","event_type":"propose_claim","claim":{"claim_id":"c1","parent_claim_ids":[],"claim_status":"proposed"}}"#,
            r#"{"run_id":"r","step_id":5,"agent_id":"a","event_type":"endorse_claim","target_claim_id":"c1"}"#,
        ]);
        let report = validate_bundle(&b);
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::NonMonotoneStep));
    }

    #[test]
    fn orphan_subtask_parent_is_a_warning_not_a_violation() {
        let b = bundle_of(&[
            r#"{"run_id":"r","step_id":0,"agent_id":"a","event_type":"delegate_subtask","subtask":{"subtask_id":"T1","parent_subtask_id":"T0","assigned_agent":"a","subtask_status":"active"}}"#,
        ]);
        let report = validate_bundle(&b);
        assert!(report.ok);
        assert_eq!(report.warnings.len(), 1);
        assert_eq!(report.warnings[0].kind, ViolationKind::UndefinedSubtaskRef);
    }
}
