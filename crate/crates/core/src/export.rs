//! CSV and JSON writers for analysis artifacts. All writers are
//! deterministic: rows come out in a fixed order and no timestamps are
//! embedded.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::graph::{ClaimGraph, SubtaskTree};
use crate::observables::EventSizeSample;

pub fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> std::io::Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()
}

/// One row per sample: observable, size, run, condition labels.
pub fn write_samples_csv(samples: &[EventSizeSample], path: &Path) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["observable", "size", "run_id", "topology", "task_family", "n"])?;
    for s in samples {
        w.write_record([
            s.observable.as_str(),
            &s.size.to_string(),
            &s.run_id,
            s.condition.topology.as_str(),
            s.condition.task_family.as_str(),
            &s.condition.n.to_string(),
        ])?;
    }
    w.flush()
}

/// Edge lists of both reconstructed structures (parent_id, child_id, kind)
/// for external visualization.
pub fn write_edges_csv(
    graph: Option<&ClaimGraph>,
    tree: Option<&SubtaskTree>,
    path: &Path,
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["parent_id", "child_id", "kind"])?;
    if let Some(g) = graph {
        for (parent, child) in &g.edges {
            w.write_record([parent, child, "claim"])?;
        }
    }
    if let Some(t) = tree {
        for node in t.nodes.values() {
            if let Some(parent) = &node.parent_subtask_id {
                w.write_record([parent, &node.subtask_id, "subtask"])?;
            }
        }
    }
    w.flush()
}

/// Flat summary row mirroring the global tail-statistics table layout.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SummaryRow {
    pub observable: String,
    pub n_total: u64,
    pub x_min: Option<u64>,
    pub n_tail: Option<u64>,
    pub alpha_hat: Option<f64>,
    pub xc_hat: Option<f64>,
    pub tail_family: Option<String>,
    pub x_max: Option<u64>,
    pub distinct: Option<u64>,
    pub lr_tpl_ln: Option<f64>,
    pub p_tpl_ln: Option<f64>,
    pub lr_tpl_pl: Option<f64>,
    pub p_tpl_pl: Option<f64>,
    pub status: String,
}

impl SummaryRow {
    pub fn insufficient(observable: &str, n_total: u64, reason: &str) -> Self {
        SummaryRow {
            observable: observable.to_string(),
            n_total,
            x_min: None,
            n_tail: None,
            alpha_hat: None,
            xc_hat: None,
            tail_family: None,
            x_max: None,
            distinct: None,
            lr_tpl_ln: None,
            p_tpl_ln: None,
            lr_tpl_pl: None,
            p_tpl_pl: None,
            status: format!("insufficient: {reason}"),
        }
    }
}

pub fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "observable",
        "n_total",
        "x_min",
        "n_tail",
        "alpha_hat",
        "xc_hat",
        "tail_family",
        "x_max",
        "distinct",
        "lr_tpl_ln",
        "p_tpl_ln",
        "lr_tpl_pl",
        "p_tpl_pl",
        "status",
    ])?;
    let fmt_u = |v: &Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
    let fmt_f = |v: &Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.observable.clone(),
            r.n_total.to_string(),
            fmt_u(&r.x_min),
            fmt_u(&r.n_tail),
            fmt_f(&r.alpha_hat),
            fmt_f(&r.xc_hat),
            r.tail_family.clone().unwrap_or_default(),
            fmt_u(&r.x_max),
            fmt_u(&r.distinct),
            fmt_f(&r.lr_tpl_ln),
            fmt_f(&r.p_tpl_ln),
            fmt_f(&r.lr_tpl_pl),
            fmt_f(&r.p_tpl_pl),
            r.status.clone(),
        ])?;
    }
    w.flush()
}
