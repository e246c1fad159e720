use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{EventRecord, RunMeta, TaskFamily, Topology, TraceBundle};
use super::{SchemaError, TraceError};

/// Result of ingesting a stream: the bundle of well-formed records plus a
/// diagnostics list for every malformed line. Nothing is silently dropped.
#[derive(Debug)]
pub struct ParseOutcome {
    pub bundle: TraceBundle,
    pub diagnostics: Vec<SchemaError>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MetaLine {
    run_meta: MetaBody,
}

#[derive(Debug, Serialize, Deserialize)]
struct MetaBody {
    run_id: String,
    #[serde(flatten)]
    meta: RunMeta,
}

/// Parses a line-delimited JSON trace stream.
///
/// Each non-empty line must be one event record or a `run_meta` object.
/// Well-formed records are kept in input order; malformed lines become
/// [`SchemaError`] diagnostics with 1-based line numbers. Runs with no
/// explicit `run_meta` line get a synthesized entry (agent count = distinct
/// agents observed, fully-connected topology, reasoning family, seed 0).
pub fn parse_trace<R: BufRead>(reader: R) -> Result<ParseOutcome, TraceError> {
    let mut records: Vec<EventRecord> = Vec::new();
    let mut run_meta: BTreeMap<String, RunMeta> = BTreeMap::new();
    let mut diagnostics: Vec<SchemaError> = Vec::new();
    let mut saw_line = false;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        saw_line = true;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let value: serde_json::Value = match serde_json::from_str(trimmed) {
            Ok(v) => v,
            Err(e) => {
                diagnostics.push(SchemaError {
                    line: line_no,
                    message: format!("invalid json: {e}"),
                });
                continue;
            }
        };
        if value.get("run_meta").is_some() {
            match serde_json::from_value::<MetaLine>(value) {
                Ok(m) => {
                    run_meta.insert(m.run_meta.run_id, m.run_meta.meta);
                }
                Err(e) => diagnostics.push(SchemaError {
                    line: line_no,
                    message: format!("invalid run_meta: {e}"),
                }),
            }
            continue;
        }
        match serde_json::from_value::<EventRecord>(value) {
            Ok(r) => records.push(r),
            Err(e) => diagnostics.push(SchemaError {
                line: line_no,
                message: format!("invalid record: {e}"),
            }),
        }
    }

    if !saw_line {
        return Err(TraceError::EmptyInput);
    }

    synthesize_missing_meta(&records, &mut run_meta);
    Ok(ParseOutcome {
        bundle: TraceBundle { records, run_meta },
        diagnostics,
    })
}

fn synthesize_missing_meta(records: &[EventRecord], run_meta: &mut BTreeMap<String, RunMeta>) {
    let mut agents: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for r in records {
        agents
            .entry(r.run_id.as_str())
            .or_default()
            .insert(r.agent_id.as_str());
    }
    for (run_id, seen) in agents {
        if !run_meta.contains_key(run_id) {
            run_meta.insert(
                run_id.to_string(),
                RunMeta {
                    agent_count: seen.len() as u32,
                    topology: Topology::FullyConnected,
                    task_family: TaskFamily::Reasoning,
                    seed: 0,
                    synthesized: true,
                },
            );
        }
    }
}

/// Opens and parses a trace file; gzip-compressed input is detected by magic
/// bytes and decompressed transparently.
pub fn parse_trace_path(path: &Path) -> Result<ParseOutcome, TraceError> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic)?;
    let file = {
        use std::io::Seek;
        let mut f = file;
        f.seek(std::io::SeekFrom::Start(0))?;
        f
    };
    if n == 2 && magic == [0x1f, 0x8b] {
        parse_trace(BufReader::new(flate2::read::GzDecoder::new(file)))
    } else {
        parse_trace(BufReader::new(file))
    }
}

/// Serializes a bundle back to line-delimited JSON: one `run_meta` line per
/// run (at its first record), then records in input order, field-identical to
/// what was parsed.
pub fn write_jsonl<W: Write>(bundle: &TraceBundle, mut writer: W) -> std::io::Result<()> {
    let mut meta_written: BTreeSet<&str> = BTreeSet::new();
    for r in &bundle.records {
        if meta_written.insert(r.run_id.as_str()) {
            if let Some(meta) = bundle.run_meta.get(&r.run_id) {
                let line = MetaLine {
                    run_meta: MetaBody {
                        run_id: r.run_id.clone(),
                        meta: meta.clone(),
                    },
                };
                serde_json::to_writer(&mut writer, &line)?;
                writer.write_all(b"\n")?;
            }
        }
        serde_json::to_writer(&mut writer, r)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_jsonl_path(bundle: &TraceBundle, path: &Path) -> std::io::Result<()> {
    let file = File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_jsonl(bundle, &mut w)?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse_str(s: &str) -> Result<ParseOutcome, TraceError> {
        parse_trace(Cursor::new(s.as_bytes()))
    }

    #[test]
    fn empty_stream_is_an_error() {
        assert!(matches!(parse_str(""), Err(TraceError::EmptyInput)));
    }

    #[test]
    fn missing_event_type_becomes_schema_error() {
        let out = parse_str(r#"{"run_id":"r","step_id":0,"agent_id":"a"}"#).unwrap();
        assert_eq!(out.bundle.records.len(), 0);
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.diagnostics[0].line, 1);
        assert!(out.diagnostics[0].message.contains("event_type"));
    }

    #[test]
    fn unknown_event_type_is_diagnosed_with_line_number() {
        let s = concat!(
            r#"{"run_id":"r","step_id":0,"agent_id":"a","event_type":"propose_claim","claim":{"claim_id":"c1","parent_claim_ids":[],"claim_status":"proposed"}}"#,
            "\n",
            r#"{"run_id":"r","step_id":1,"agent_id":"a","event_type":"frobnicate"}"#,
        );
        let out = parse_str(s).unwrap();
        assert_eq!(out.bundle.records.len(), 1);
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.diagnostics[0].line, 2);
    }

    #[test]
    fn meta_absent_is_synthesized_from_distinct_agents() {
        let s = concat!(
            r#"{"run_id":"r","step_id":0,"agent_id":"a1","event_type":"propose_claim","claim":{"claim_id":"c1","parent_claim_ids":[],"claim_status":"proposed"}}"#,
            "\n",
            r#"{"run_id":"r","step_id":1,"agent_id":"a2","event_type":"endorse_claim","target_claim_id":"c1"}"#,
        );
        let out = parse_str(s).unwrap();
        let meta = &out.bundle.run_meta["r"];
        assert_eq!(meta.agent_count, 2);
        assert!(meta.synthesized);
    }

    #[test]
    fn extra_fields_survive_round_trip() {
        let s = r#"{"run_id":"r","step_id":0,"agent_id":"a","event_type":"propose_claim","note":"kept","claim":{"claim_id":"c1","parent_claim_ids":[],"claim_status":"proposed","claim_depth":0}}"#;
        let out = parse_str(s).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&out.bundle, &mut buf).unwrap();
        let again = parse_trace(Cursor::new(buf)).unwrap();
        assert_eq!(again.bundle.records, out.bundle.records);
        assert_eq!(
            out.bundle.records[0].extra.get("note"),
            Some(&serde_json::Value::String("kept".into()))
        );
    }

    #[test]
    fn gzip_input_is_accepted() {
        use flate2::write::GzEncoder;
        use flate2::Compression;
        let line = r#"{"run_id":"r","step_id":0,"agent_id":"a","event_type":"propose_claim","claim":{"claim_id":"c1","parent_claim_ids":[],"claim_status":"proposed"}}"#;
        let mut enc = GzEncoder::new(Vec::new(), Compression::default());
        enc.write_all(line.as_bytes()).unwrap();
        let gz = enc.finish().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.jsonl.gz");
        std::fs::write(&path, gz).unwrap();
        let out = parse_trace_path(&path).unwrap();
        assert_eq!(out.bundle.records.len(), 1);
    }
}
