use serde::Serialize;

use crate::analysis::analyze_bundle;
use crate::observables::Observable;
use crate::tail::{compare_fits, fit_family, select_xmin, Family, TailData};
use crate::trace::{EventType, TraceBundle};

use super::runner::DtiReport;
use super::DtiError;

/// Tail structure of pooled TCE for one side.
#[derive(Debug, Clone, Serialize)]
pub struct TailSummary {
    pub n_tail: u64,
    pub x_min: u64,
    pub alpha_hat: f64,
    pub xc_hat: f64,
    pub lr_tpl_ln: f64,
    pub p_tpl_ln: f64,
    pub lr_tpl_pl: f64,
    pub p_tpl_pl: f64,
}

/// Side-by-side summary of one bundle.
#[derive(Debug, Clone, Serialize)]
pub struct SideSummary {
    pub tail: Option<TailSummary>,
    pub cascades: u64,
    pub merge_conversion_overall: Option<f64>,
    /// Mean conversion over the top decile of cascades by TCE.
    pub merge_conversion_top_decile: Option<f64>,
    /// Contradiction events over all events.
    pub contradiction_density: f64,
    /// Mean top-10% active-agent effort share across runs.
    pub e_active_10: f64,
    pub triggers: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InterventionReport {
    pub baseline: SideSummary,
    pub treated: SideSummary,
}

/// Compares a baseline bundle against a treated one: tail preference, fitted
/// TPL parameters, merge conversion by TCE quantile, contradiction density,
/// concentration, and trigger counts.
pub fn evaluate_intervention(
    baseline: &TraceBundle,
    treated: &TraceBundle,
    tau: u64,
    treated_report: Option<&DtiReport>,
) -> Result<InterventionReport, DtiError> {
    Ok(InterventionReport {
        baseline: summarize_side(baseline, tau, None)?,
        treated: summarize_side(treated, tau, treated_report)?,
    })
}

pub(crate) fn summarize_side(
    bundle: &TraceBundle,
    tau: u64,
    report: Option<&DtiReport>,
) -> Result<SideSummary, DtiError> {
    let analysis = analyze_bundle(bundle, tau)?;
    let tce = analysis.sizes_of(Observable::Tce);

    let tail = select_xmin(&tce, Family::PowerLaw).ok().and_then(|(x_min, _)| {
        let tpl = fit_family(&tce, Family::TruncatedPowerLaw, x_min).ok()?;
        let ln = fit_family(&tce, Family::LogNormal, x_min).ok()?;
        let pl = fit_family(&tce, Family::PowerLaw, x_min).ok()?;
        let data = TailData::from_samples(&tce, x_min);
        let vs_ln = compare_fits(&data, &tpl, &ln).ok()?;
        let vs_pl = compare_fits(&data, &tpl, &pl).ok()?;
        Some(TailSummary {
            n_tail: tpl.n_tail,
            x_min,
            alpha_hat: tpl.alpha_hat().unwrap(),
            xc_hat: tpl.xc_hat().unwrap(),
            lr_tpl_ln: vs_ln.lr,
            p_tpl_ln: vs_ln.p_value,
            lr_tpl_pl: vs_pl.lr,
            p_tpl_pl: vs_pl.p_value,
        })
    });

    // Conversion, overall and over the top TCE decile.
    let mut by_tce: Vec<(u64, Option<f64>)> = analysis
        .cascade_stats
        .iter()
        .map(|c| (c.stats.tce, c.stats.merge_conversion_ratio))
        .collect();
    by_tce.sort_by(|a, b| b.0.cmp(&a.0));
    let mean_defined = |items: &[(u64, Option<f64>)]| {
        let defined: Vec<f64> = items.iter().filter_map(|(_, c)| *c).collect();
        (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
    };
    let top = by_tce.len().div_ceil(10);
    let merge_conversion_top_decile = mean_defined(&by_tce[..top.min(by_tce.len())]);
    let merge_conversion_overall = mean_defined(&by_tce);

    let total_events = bundle.records.len() as f64;
    let contradictions = bundle
        .records
        .iter()
        .filter(|r| r.event_type == EventType::ContradictClaim)
        .count() as f64;

    let e10: Vec<f64> = analysis
        .concentration
        .iter()
        .map(|(_, c)| c.e_active[&10])
        .collect();
    let e_active_10 = if e10.is_empty() {
        0.0
    } else {
        e10.iter().sum::<f64>() / e10.len() as f64
    };

    Ok(SideSummary {
        tail,
        cascades: analysis.cascade_stats.len() as u64,
        merge_conversion_overall,
        merge_conversion_top_decile,
        contradiction_density: if total_events > 0.0 {
            contradictions / total_events
        } else {
            0.0
        },
        e_active_10,
        triggers: report.map_or(0, |r| r.triggers.len() as u64),
    })
}
