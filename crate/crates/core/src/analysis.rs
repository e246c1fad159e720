//! One-stop reconstruction of a bundle: per run, the subtask tree, claim DAG
//! with derived groupings, cascades, observable samples, cascade stats, and
//! concentration report.

use serde::Serialize;

use crate::graph::{
    build_claim_graph, build_subtask_tree, derive_groupings, extract_cascades, GraphError,
};
use crate::observables::{
    cascade_stats, collect_run_samples, concentration, extreme_samples, CascadeStats,
    ConcentrationReport, EventSizeSample, ExtremeSample, Observable,
};
use crate::trace::TraceBundle;

#[derive(Debug, Clone, Serialize)]
pub struct RunCascadeStats {
    pub run_id: String,
    #[serde(flatten)]
    pub stats: CascadeStats,
}

#[derive(Debug, Default, Serialize)]
pub struct BundleAnalysis {
    /// Event-size samples pooled over all runs.
    pub samples: Vec<EventSizeSample>,
    pub cascade_stats: Vec<RunCascadeStats>,
    /// Per-run concentration (runs with zero claims are skipped).
    pub concentration: Vec<(String, ConcentrationReport)>,
    pub extremes: Vec<ExtremeSample>,
}

impl BundleAnalysis {
    pub fn sizes_of(&self, observable: Observable) -> Vec<u64> {
        self.samples
            .iter()
            .filter(|s| s.observable == observable)
            .map(|s| s.size)
            .collect()
    }
}

/// Reconstructs every run of the bundle and pools the observables.
pub fn analyze_bundle(bundle: &TraceBundle, tau: u64) -> Result<BundleAnalysis, GraphError> {
    let mut out = BundleAnalysis::default();
    for run in bundle.runs() {
        let tree = build_subtask_tree(&run)?;
        let mut graph = build_claim_graph(&run)?;
        derive_groupings(&mut graph, tau);
        let cascades = extract_cascades(&graph, &run);
        out.samples
            .extend(collect_run_samples(&run, &tree, &graph, &cascades));
        out.cascade_stats
            .extend(
                cascade_stats(&cascades, &run)
                    .into_iter()
                    .map(|stats| RunCascadeStats {
                        run_id: run.run_id.to_string(),
                        stats,
                    }),
            );
        if let Ok(report) = concentration(&run) {
            out.concentration.push((run.run_id.to_string(), report));
        }
    }
    out.extremes = extreme_samples(&out.samples);
    Ok(out)
}
