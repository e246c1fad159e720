use std::collections::BTreeMap;

use crate::graph::{build_claim_graph, extract_cascades};
use crate::tail::ols;
use crate::trace::{EventType, TraceBundle};

use super::controller::{ConditionClass, DtiParams, DtiParamsTable};
use super::DtiError;

/// Per-cascade calibration observations.
#[derive(Debug, Clone)]
pub struct CalibrationInput {
    pub class: ConditionClass,
    /// (t, cumulative contradictions) points with at least one contradiction.
    pub contradiction_curve: Vec<(u64, u64)>,
    /// Cascade length at termination.
    pub t_end: u64,
    /// Realized merges at termination.
    pub m_end: u64,
}

const MIN_CASCADES: usize = 20;

/// Estimates (a_c, delta_c, beta_c) per condition class from baseline traces:
/// beta_c is the pooled log-log slope of cumulative contradiction count vs t
/// within cascades, a_c the zero-intercept least-squares scale relating
/// terminal merges to t^beta_c, and delta_c the mean plus one standard
/// deviation of the terminal deficit.
pub fn calibrate(bundle: &TraceBundle, stratify_by_n: bool) -> Result<DtiParamsTable, DtiError> {
    let inputs = collect_inputs(bundle, stratify_by_n)?;
    calibrate_from_inputs(&inputs, !stratify_by_n)
}

/// Calibration from pre-extracted per-cascade observations.
pub fn calibrate_from_inputs(
    inputs: &[CalibrationInput],
    pooled_n: bool,
) -> Result<DtiParamsTable, DtiError> {
    let mut by_class: BTreeMap<String, Vec<&CalibrationInput>> = BTreeMap::new();
    for i in inputs {
        by_class.entry(i.class.key()).or_default().push(i);
    }
    let mut table = DtiParamsTable {
        pooled_n,
        ..Default::default()
    };
    for (class, cascades) in by_class {
        if cascades.len() < MIN_CASCADES {
            return Err(DtiError::InsufficientCascades {
                class,
                count: cascades.len(),
            });
        }
        let params = calibrate_class(&class, &cascades)?;
        table.classes.insert(class, params);
    }
    Ok(table)
}

fn calibrate_class(class: &str, cascades: &[&CalibrationInput]) -> Result<DtiParams, DtiError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for c in cascades {
        for &(t, contra) in &c.contradiction_curve {
            xs.push((t as f64).ln());
            ys.push((contra as f64).ln());
        }
    }
    let distinct_t = {
        let mut v = xs.clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v.len()
    };
    if distinct_t < 2 {
        return Err(DtiError::DegenerateBaseline {
            class: class.to_string(),
            reason: "no usable contradiction growth points".into(),
        });
    }
    let (beta_c_hat, _, _) = ols(&xs, &ys);
    if !(beta_c_hat > 0.0) || !beta_c_hat.is_finite() {
        return Err(DtiError::DegenerateBaseline {
            class: class.to_string(),
            reason: format!("contradiction scaling slope {beta_c_hat} not positive"),
        });
    }

    // Zero-intercept least squares of M on t^beta at termination.
    let mut num = 0.0;
    let mut den = 0.0;
    for c in cascades {
        let tb = (c.t_end as f64).powf(beta_c_hat);
        num += tb * c.m_end as f64;
        den += tb * tb;
    }
    let a_c = num / den;
    if !(a_c > 0.0) {
        return Err(DtiError::DegenerateBaseline {
            class: class.to_string(),
            reason: "baseline has no merges; pressure scale is zero".into(),
        });
    }

    let deficits: Vec<f64> = cascades
        .iter()
        .map(|c| a_c * (c.t_end as f64).powf(beta_c_hat) - c.m_end as f64)
        .collect();
    let mean = deficits.iter().sum::<f64>() / deficits.len() as f64;
    let var = deficits
        .iter()
        .map(|d| (d - mean) * (d - mean))
        .sum::<f64>()
        / (deficits.len() - 1).max(1) as f64;
    Ok(DtiParams {
        a_c,
        delta_c: mean + var.sqrt(),
        beta_c_hat,
    })
}

fn collect_inputs(
    bundle: &TraceBundle,
    stratify_by_n: bool,
) -> Result<Vec<CalibrationInput>, DtiError> {
    let mut out = Vec::new();
    for run in bundle.runs() {
        let class = ConditionClass {
            topology: run.meta.topology,
            task_family: run.meta.task_family,
            n: stratify_by_n.then_some(run.meta.agent_count),
        };
        let graph = build_claim_graph(&run)?;
        let cascades = extract_cascades(&graph, &run);
        let pos_of: BTreeMap<usize, usize> = run
            .indices
            .iter()
            .enumerate()
            .map(|(pos, &idx)| (idx, pos))
            .collect();
        for cascade in cascades {
            let mut contradiction_curve = Vec::new();
            let mut contra = 0u64;
            let mut merges = 0u64;
            for (t0, &idx) in cascade.member_event_indices.iter().enumerate() {
                let r = run.records[pos_of[&idx]];
                match r.event_type {
                    EventType::ContradictClaim => contra += 1,
                    EventType::MergeClaims => merges += 1,
                    _ => {}
                }
                if contra >= 1 {
                    contradiction_curve.push((t0 as u64 + 1, contra));
                }
            }
            out.push(CalibrationInput {
                class,
                contradiction_curve,
                t_end: cascade.tce(),
                m_end: merges,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{TaskFamily, Topology};

    fn class() -> ConditionClass {
        ConditionClass {
            topology: Topology::Chain,
            task_family: TaskFamily::Qa,
            n: None,
        }
    }

    /// Merges exactly track a * t^b: both the exponent and the scale come
    /// back to machine precision.
    #[test]
    fn exact_law_inputs_are_recovered() {
        let (a, b) = (0.25, 1.0);
        let inputs: Vec<CalibrationInput> = (0..24)
            .map(|i| {
                let t_end = 4 * (i as u64 % 6 + 1); // 4..24
                CalibrationInput {
                    class: class(),
                    // c(t) = t exactly: slope b = 1.
                    contradiction_curve: (1..=t_end).map(|t| (t, t)).collect(),
                    t_end,
                    m_end: (a * t_end as f64).round() as u64, // exact: 1..6
                }
            })
            .collect();
        let table = calibrate_from_inputs(&inputs, true).unwrap();
        let p = table.lookup(Topology::Chain, TaskFamily::Qa, 8).unwrap();
        assert!((p.beta_c_hat - b).abs() < 1e-3, "beta {}", p.beta_c_hat);
        assert!((p.a_c - a).abs() < 1e-3, "a_c {}", p.a_c);
        // Terminal deficits are exactly zero under the exact law.
        assert!(p.delta_c.abs() < 1e-9);
    }

    #[test]
    fn too_few_cascades_is_an_error() {
        let inputs: Vec<CalibrationInput> = (0..5)
            .map(|_| CalibrationInput {
                class: class(),
                contradiction_curve: vec![(1, 1), (2, 2)],
                t_end: 3,
                m_end: 1,
            })
            .collect();
        assert!(matches!(
            calibrate_from_inputs(&inputs, true),
            Err(DtiError::InsufficientCascades { .. })
        ));
    }

    #[test]
    fn zero_contradiction_baseline_is_degenerate() {
        let inputs: Vec<CalibrationInput> = (0..30)
            .map(|_| CalibrationInput {
                class: class(),
                contradiction_curve: Vec::new(),
                t_end: 5,
                m_end: 1,
            })
            .collect();
        assert!(matches!(
            calibrate_from_inputs(&inputs, true),
            Err(DtiError::DegenerateBaseline { .. })
        ));
    }
}
