use std::collections::VecDeque;

use serde::Serialize;

use crate::graph::{build_claim_graph, extract_cascades};
use crate::sim::{Engine, InjectedMerge, SimConfig, TurnOutcome};
use crate::trace::{EventType, TraceBundle};

use super::controller::{DtiController, DtiParams, TriggerDirective};
use super::DtiError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriggerEvent {
    pub step: u64,
    pub root: String,
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeficitPoint {
    pub root: String,
    pub step: u64,
    pub deficit: f64,
}

/// Evaluation record of one controlled run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct DtiReport {
    pub triggers: Vec<TriggerEvent>,
    pub injected_merges: u64,
    pub deficit_series: Vec<DeficitPoint>,
    /// Merge conversion before/after the first trigger, per triggered
    /// cascade (None where the side has no expansion events).
    pub conversion_pre_post: Vec<(String, Option<f64>, Option<f64>)>,
}

/// Runs the simulator with the DTI controller attached. On a trigger, the
/// next scheduled agent's action is replaced by a merge over the directive's
/// branch heads, one for one, so the step budget is conserved. Controller
/// bookkeeping is driven by the emitted records themselves; injected merges
/// are not re-observed (the segment reset already accounts for them).
pub fn run_with_dti(
    config: &SimConfig,
    params: &DtiParams,
) -> Result<(TraceBundle, DtiReport), DtiError> {
    let mut engine = Engine::new(config)?;
    let mut controller = DtiController::new(*params);
    controller.log_deficits = true;
    let mut pending: VecDeque<TriggerDirective> = VecDeque::new();
    let mut report = DtiReport::default();

    loop {
        let inject = next_injection(&engine, &mut pending);
        let injected_now = inject.is_some();
        let outcome = engine.step(inject.as_ref());
        let (start, end) = match outcome {
            TurnOutcome::Done => break,
            TurnOutcome::Skipped => continue,
            TurnOutcome::Emitted(s, e) => (s, e),
        };
        if injected_now {
            report.injected_merges += 1;
            continue;
        }
        for i in start..end {
            let record = &engine.records()[i];
            let root = match record_root(&engine, record) {
                Some(r) => r,
                None => continue,
            };
            let created: Option<(String, Vec<String>)> = record
                .claim
                .as_ref()
                .map(|c| (c.claim_id.clone(), c.parent_claim_ids.clone()));
            let directive = controller.step(
                &root,
                record.event_type == EventType::MergeClaims,
                created.as_ref().map(|(id, p)| (id.as_str(), p.as_slice())),
                record.step_id,
            );
            if let Some(d) = directive {
                report.triggers.push(TriggerEvent {
                    step: d.step,
                    root: d.root.clone(),
                    deficit: d.deficit,
                });
                pending.push_back(d);
            }
        }
    }

    report.deficit_series = controller
        .deficit_log
        .iter()
        .map(|(root, step, deficit)| DeficitPoint {
            root: root.clone(),
            step: *step,
            deficit: *deficit,
        })
        .collect();

    let bundle = engine.into_bundle();
    report.conversion_pre_post = pre_post_conversion(&bundle, &report.triggers)?;
    Ok((bundle, report))
}

fn next_injection(engine: &Engine, pending: &mut VecDeque<TriggerDirective>) -> Option<InjectedMerge> {
    while let Some(d) = pending.pop_front() {
        let root = engine.claim_index(&d.root)?;
        let parents: Vec<u32> = d
            .branch_heads
            .iter()
            .filter_map(|h| engine.claim_index(h))
            .filter(|&idx| engine.claim_alive(idx))
            .collect();
        if parents.len() >= 2 {
            return Some(InjectedMerge { root, parents });
        }
        // Heads died before execution; drop the directive and try the next.
    }
    None
}

fn record_root(engine: &Engine, record: &crate::trace::EventRecord) -> Option<String> {
    let idx = if let Some(c) = &record.claim {
        engine.claim_index(&c.claim_id)?
    } else {
        engine.claim_index(record.target_claim_id.as_deref()?)?
    };
    Some(format!("c{}", engine.claim_root(idx) + 1))
}

/// Conversion ratio before vs after the first trigger of each triggered root.
fn pre_post_conversion(
    bundle: &TraceBundle,
    triggers: &[TriggerEvent],
) -> Result<Vec<(String, Option<f64>, Option<f64>)>, DtiError> {
    let mut first_trigger: std::collections::BTreeMap<&str, u64> = Default::default();
    for t in triggers {
        first_trigger
            .entry(t.root.as_str())
            .and_modify(|s| *s = (*s).min(t.step))
            .or_insert(t.step);
    }
    if first_trigger.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for run in bundle.runs() {
        let graph = build_claim_graph(&run)?;
        let cascades = extract_cascades(&graph, &run);
        let pos_of: std::collections::BTreeMap<usize, usize> = run
            .indices
            .iter()
            .enumerate()
            .map(|(pos, &idx)| (idx, pos))
            .collect();
        for cascade in cascades {
            let Some(&split) = first_trigger.get(cascade.root_claim_id.as_str()) else {
                continue;
            };
            let mut counts = [[0u64; 2]; 2]; // [pre/post][expansion/merge]
            for &idx in &cascade.member_event_indices {
                let r = run.records[pos_of[&idx]];
                let side = usize::from(r.step_id > split);
                match r.event_type {
                    EventType::DelegateSubtask
                    | EventType::ReviseClaim
                    | EventType::ContradictClaim => counts[side][0] += 1,
                    EventType::MergeClaims => counts[side][1] += 1,
                    _ => {}
                }
            }
            let ratio = |c: [u64; 2]| (c[0] > 0).then(|| c[1] as f64 / c[0] as f64);
            out.push((cascade.root_claim_id, ratio(counts[0]), ratio(counts[1])));
        }
    }
    Ok(out)
}
