//! Preferential-attachment estimation from routing decisions.
//!
//! Every event that targets an existing claim is one routing decision. The
//! routing ratio R(x, N) compares, per logarithmic activity bin, the observed
//! selection frequency against a uniform-over-alive-claims null (a claim is
//! alive from its definition until run end). Activity is 1 plus the count of
//! prior events referencing the claim, matching the simulator's unit
//! initialization.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::trace::{EventType, TraceBundle};

use super::zeta::ols;
use super::TailError;

/// Bin ratio 10^(1/5): five bins per decade.
const BIN_LOG10: f64 = 0.2;
/// A curve bin enters the slope fit with at least this many observations.
const MIN_BIN_OBS: u64 = 5;
const MIN_DECISIONS: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttachmentBin {
    /// Geometric center of the activity bin.
    pub x_center: f64,
    /// Observed selection frequency over the null frequency.
    pub routing_ratio: f64,
    pub observed: u64,
    pub null_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventAttachment {
    pub event_type: EventType,
    pub events: u64,
    /// Attachment slope restricted to decisions of this type; None with
    /// fewer than three populated bins.
    pub beta_e: Option<f64>,
    /// Fraction of events whose child claim(s) later receive >= 1 event.
    pub p_cont: Option<f64>,
    /// Amplification potential beta_e * p_cont.
    pub amplification: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttachmentEstimate {
    /// OLS slope of log R vs log x over populated bins.
    pub beta_hat: f64,
    pub decisions: u64,
    pub curve: Vec<AttachmentBin>,
    pub per_event: Vec<EventAttachment>,
}

fn bin_of(activity: u64) -> usize {
    ((activity as f64).log10() / BIN_LOG10).floor() as usize
}

fn bin_center(bin: usize) -> f64 {
    10f64.powf(BIN_LOG10 * (bin as f64 + 0.5))
}

#[derive(Clone, Copy)]
enum Origin {
    Event(EventType),
    Subtask(u32),
}

/// Estimates the attachment curve, pooled slope, and per-event-type slopes
/// and continuation probabilities over all runs of a bundle.
pub fn estimate_attachment(bundle: &TraceBundle) -> Result<AttachmentEstimate, TailError> {
    const NBINS: usize = 80;
    let mut obs = vec![0u64; NBINS];
    let mut null = vec![0f64; NBINS];
    let mut obs_by_type: BTreeMap<EventType, Vec<u64>> = BTreeMap::new();
    let mut decisions = 0u64;

    let mut type_events: BTreeMap<EventType, u64> = BTreeMap::new();
    let mut type_continued: BTreeMap<EventType, u64> = BTreeMap::new();

    for run in bundle.runs() {
        let mut activity: BTreeMap<&str, u64> = BTreeMap::new();
        let mut origin: BTreeMap<&str, Origin> = BTreeMap::new();
        let mut subtask_ids: BTreeMap<&str, u32> = BTreeMap::new();
        let mut subtask_continued: Vec<bool> = Vec::new();
        let mut subtask_owner_type: Vec<EventType> = Vec::new();
        let mut hist = vec![0u64; NBINS];
        let mut alive = 0u64;

        for r in &run.records {
            // Routing decision observed before this record mutates activity.
            if let Some(target) = &r.target_claim_id {
                if let Some(&x) = activity.get(target.as_str()) {
                    let b = bin_of(x);
                    obs[b] += 1;
                    obs_by_type
                        .entry(r.event_type)
                        .or_insert_with(|| vec![0; NBINS])[b] += 1;
                    decisions += 1;
                    for (b, &count) in hist.iter().enumerate() {
                        if count > 0 {
                            null[b] += count as f64 / alive as f64;
                        }
                    }
                }
            }

            // Reference bumps: the claim moves one activity bin at a time.
            for referenced in r.referenced_claims() {
                if let Some(x) = activity.get_mut(referenced) {
                    let (from, to) = (bin_of(*x), bin_of(*x + 1));
                    if *x == 1 {
                        // First engagement: credit the creating event.
                        match origin.get(referenced) {
                            Some(Origin::Event(t)) => {
                                *type_continued.entry(*t).or_insert(0) += 1;
                            }
                            Some(Origin::Subtask(s)) => {
                                if !subtask_continued[*s as usize] {
                                    subtask_continued[*s as usize] = true;
                                    *type_continued
                                        .entry(subtask_owner_type[*s as usize])
                                        .or_insert(0) += 1;
                                }
                            }
                            None => {}
                        }
                    }
                    *x += 1;
                    if from != to {
                        hist[from] -= 1;
                        hist[to] += 1;
                    }
                }
            }

            if let Some(s) = &r.subtask {
                if r.event_type == EventType::DelegateSubtask {
                    let idx = subtask_continued.len() as u32;
                    subtask_ids.insert(s.subtask_id.as_str(), idx);
                    subtask_continued.push(false);
                    subtask_owner_type.push(EventType::DelegateSubtask);
                    *type_events.entry(EventType::DelegateSubtask).or_insert(0) += 1;
                }
            }

            if let Some(c) = &r.claim {
                if !activity.contains_key(c.claim_id.as_str()) {
                    activity.insert(&c.claim_id, 1);
                    hist[0] += 1;
                    alive += 1;
                    match r.event_type {
                        EventType::ReviseClaim
                        | EventType::ContradictClaim
                        | EventType::MergeClaims => {
                            origin.insert(&c.claim_id, Origin::Event(r.event_type));
                            *type_events.entry(r.event_type).or_insert(0) += 1;
                        }
                        _ => {
                            if let Some(t) = &r.target_subtask_id {
                                if let Some(&s) = subtask_ids.get(t.as_str()) {
                                    origin.insert(&c.claim_id, Origin::Subtask(s));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    if decisions < MIN_DECISIONS {
        return Err(TailError::InsufficientDecisions { decisions });
    }

    let slope_of = |observed: &[u64], total: u64| -> (Vec<AttachmentBin>, Option<f64>) {
        let mut curve = Vec::new();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for b in 0..NBINS {
            if observed[b] >= MIN_BIN_OBS && null[b] > 0.0 {
                let freq = observed[b] as f64 / total as f64;
                let null_freq = null[b] / decisions as f64;
                let ratio = freq / null_freq;
                curve.push(AttachmentBin {
                    x_center: bin_center(b),
                    routing_ratio: ratio,
                    observed: observed[b],
                    null_mass: null[b],
                });
                xs.push(bin_center(b).ln());
                ys.push(ratio.ln());
            }
        }
        let slope = (xs.len() >= 3).then(|| ols(&xs, &ys).0);
        (curve, slope)
    };

    let obs_total: u64 = obs.iter().sum();
    let (curve, pooled) = slope_of(&obs, obs_total);
    let beta_hat = pooled.unwrap_or(0.0);

    let mut per_event = Vec::new();
    for t in [
        EventType::DelegateSubtask,
        EventType::ReviseClaim,
        EventType::ContradictClaim,
        EventType::MergeClaims,
        EventType::EndorseClaim,
    ] {
        let beta_e = obs_by_type.get(&t).and_then(|o| {
            let total: u64 = o.iter().sum();
            slope_of(o, total).1
        });
        let events = type_events.get(&t).copied().unwrap_or(0);
        let p_cont = match t {
            EventType::EndorseClaim => None,
            _ if events > 0 => {
                Some(type_continued.get(&t).copied().unwrap_or(0) as f64 / events as f64)
            }
            _ => None,
        };
        let amplification = match (beta_e, p_cont) {
            (Some(b), Some(p)) => Some(b * p),
            _ => None,
        };
        per_event.push(EventAttachment {
            event_type: t,
            events,
            beta_e,
            p_cont,
            amplification,
        });
    }

    Ok(AttachmentEstimate {
        beta_hat,
        decisions,
        curve,
        per_event,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_few_decisions_is_an_error() {
        let line = r#"{"run_id":"r","step_id":0,"agent_id":"a","event_type":"propose_claim","claim":{"claim_id":"c1","parent_claim_ids":[],"claim_status":"proposed"}}"#;
        let bundle = crate::trace::parse_trace(std::io::Cursor::new(line.as_bytes()))
            .unwrap()
            .bundle;
        assert!(matches!(
            estimate_attachment(&bundle),
            Err(TailError::InsufficientDecisions { .. })
        ));
    }

    #[test]
    fn bins_are_log_spaced() {
        assert_eq!(bin_of(1), 0);
        assert_eq!(bin_of(10), 5);
        assert_eq!(bin_of(100), 10);
    }
}
