//! Line-delimited score files: one JSON object per query,
//! `{"query_id": "...", "scores": {"<tool_id>": <number>, ...}}`.
//!
//! Numbers are written in shortest round-trip decimal form, so a write
//! followed by a load reproduces every score bit for bit.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ScoreVector, Tool};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct ScoreRecord {
    query_id: String,
    scores: BTreeMap<String, f64>,
}

pub fn load_scores(path: &Path, registry: &[Tool]) -> Result<BTreeMap<String, ScoreVector>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_scores(BufReader::new(file), &path.display().to_string(), registry)
}

/// Parses a score file, validating coverage against `registry`.
/// Entries of each vector follow registry order.
pub fn read_scores<R: BufRead>(
    reader: R,
    source_name: &str,
    registry: &[Tool],
) -> Result<BTreeMap<String, ScoreVector>> {
    let known: HashSet<&str> = registry.iter().map(|t| t.id.as_str()).collect();
    let mut out = BTreeMap::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line.map_err(|e| Error::data(source_name, format!("line {line_no}: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ScoreRecord = serde_json::from_str(&line)
            .map_err(|e| Error::data(source_name, format!("line {line_no}: malformed record: {e}")))?;
        let at = |msg: String| {
            Error::data(
                source_name,
                format!("line {line_no} (query {}): {msg}", record.query_id),
            )
        };
        if let Some(unknown) = record.scores.keys().find(|id| !known.contains(id.as_str())) {
            return Err(at(format!("unknown tool id {unknown:?}")));
        }
        let mut entries = Vec::with_capacity(registry.len());
        for tool in registry {
            match record.scores.get(&tool.id) {
                Some(s) if s.is_finite() => entries.push((tool.id.clone(), *s)),
                Some(s) => return Err(at(format!("non-finite score {s} for tool {:?}", tool.id))),
                None => return Err(at(format!("missing score for tool {:?}", tool.id))),
            }
        }
        if out.contains_key(&record.query_id) {
            return Err(at("duplicate query id".into()));
        }
        out.insert(
            record.query_id.clone(),
            ScoreVector {
                query_id: record.query_id,
                entries,
            },
        );
    }
    Ok(out)
}

pub fn write_scores<'a, W: Write>(writer: W, vectors: impl IntoIterator<Item = &'a ScoreVector>) -> Result<()> {
    let mut w = BufWriter::new(writer);
    let io_err = |e: std::io::Error| Error::io("<score writer>", e);
    for v in vectors {
        if let Some((id, s)) = v.entries.iter().find(|(_, s)| !s.is_finite()) {
            return Err(Error::data(
                v.query_id.clone(),
                format!("cannot serialize non-finite score {s} for tool {id:?}"),
            ));
        }
        let record = ScoreRecord {
            query_id: v.query_id.clone(),
            scores: v.entries.iter().cloned().collect(),
        };
        serde_json::to_writer(&mut w, &record).map_err(|e| io_err(std::io::Error::other(e)))?;
        w.write_all(b"\n").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn save_scores<'a>(path: &Path, vectors: impl IntoIterator<Item = &'a ScoreVector>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_scores(file, vectors).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn registry(ids: &[&str]) -> Vec<Tool> {
        ids.iter()
            .map(|id| Tool {
                id: id.to_string(),
                name: String::new(),
                description: String::new(),
                parameters: vec![],
            })
            .collect()
    }

    #[test]
    fn well_formed_file() {
        let text = r#"{"query_id":"q1","scores":{"a":1.5,"b":0.25,"c":-2}}
{"query_id":"q2","scores":{"c":3,"a":0,"b":1e-3}}
"#;
        let reg = registry(&["a", "b", "c"]);
        let loaded = read_scores(text.as_bytes(), "mem", &reg).unwrap();
        assert_eq!(loaded.len(), 2);
        assert!(loaded.values().all(|v| v.entries.len() == 3));
        assert_eq!(loaded["q2"].score_of("b"), Some(1e-3));
    }

    #[test]
    fn unknown_tool_names_record() {
        let text = r#"{"query_id":"q1","scores":{"a":1,"b":2,"c":3,"zz":4}}"#;
        let err = read_scores(text.as_bytes(), "mem", &registry(&["a", "b", "c"])).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("q1") && msg.contains("zz"), "{msg}");
    }

    #[test]
    fn missing_tool_and_malformed_line() {
        let reg = registry(&["a", "b"]);
        let err = read_scores(r#"{"query_id":"q9","scores":{"a":1}}"#.as_bytes(), "mem", &reg).unwrap_err();
        assert!(err.to_string().contains("missing score"));
        let err = read_scores("{\"query_id\":".as_bytes(), "mem", &reg).unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }

    proptest! {
        #[test]
        fn write_then_read_is_bit_exact(scores in proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 3)) {
            let reg = registry(&["a", "b", "c"]);
            let v = ScoreVector {
                query_id: "q".into(),
                entries: reg.iter().map(|t| t.id.clone()).zip(scores.iter().copied()).collect(),
            };
            let mut buf = Vec::new();
            write_scores(&mut buf, [&v]).unwrap();
            let back = read_scores(buf.as_slice(), "mem", &reg).unwrap();
            for ((_, a), (_, b)) in v.entries.iter().zip(&back["q"].entries) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
