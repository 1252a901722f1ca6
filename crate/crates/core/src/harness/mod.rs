//! Benchmarks, candidate sets, splits, difficulty buckets, the synthetic
//! generator and multi-seed experiment execution.

pub mod buckets;
pub mod candidates;
pub mod experiment;
pub mod synthetic;

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::agents::shuffled;
use crate::error::{Error, Result};
use crate::scorer::score_file::{load_scores, save_scores};
use crate::scorer::{ScoreVector, Tool};

pub use buckets::{bucketize, BucketScheme};
pub use candidates::{build_candidate_set, CandidateSet, CandidateSpec, Fill};
pub use experiment::{
    evaluate, prepare_episodes, run_experiment, run_experiment_with, train_method, ExperimentSpec, Method, Prepared,
};
pub use synthetic::{generate_synthetic, SyntheticSpec};

pub const TOOLS_FILE: &str = "tools.jsonl";
pub const QUERIES_FILE: &str = "queries.jsonl";
pub const SCORES_FILE: &str = "scores.jsonl";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub query_id: String,
    #[serde(default)]
    pub text: String,
    pub gold_ids: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Benchmark {
    pub registry: Vec<Tool>,
    pub queries: Vec<Query>,
    /// Precomputed scores keyed by query id, when available.
    pub scores: Option<BTreeMap<String, ScoreVector>>,
}

impl Benchmark {
    pub fn new(
        registry: Vec<Tool>,
        queries: Vec<Query>,
        scores: Option<BTreeMap<String, ScoreVector>>,
    ) -> Result<Self> {
        let b = Self {
            registry,
            queries,
            scores,
        };
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for t in &self.registry {
            if t.id.is_empty() {
                return Err(Error::data("registry", "tool with empty id"));
            }
            if !ids.insert(t.id.as_str()) {
                return Err(Error::data("registry", format!("duplicate tool id {:?}", t.id)));
            }
        }
        let mut seen = HashSet::new();
        for q in &self.queries {
            if !seen.insert(q.query_id.as_str()) {
                return Err(Error::data("queries", format!("duplicate query id {:?}", q.query_id)));
            }
            if q.gold_ids.is_empty() {
                return Err(Error::data(
                    "queries",
                    format!("query {:?} has no gold ids", q.query_id),
                ));
            }
            if let Some(g) = q.gold_ids.iter().find(|g| !ids.contains(g.as_str())) {
                return Err(Error::data(
                    "queries",
                    format!("query {:?} names unknown gold tool {g:?}", q.query_id),
                ));
            }
        }
        if let Some(scores) = &self.scores {
            if let Some(q) = self.queries.iter().find(|q| !scores.contains_key(&q.query_id)) {
                return Err(Error::data("scores", format!("no scores for query {:?}", q.query_id)));
            }
        }
        Ok(())
    }

    /// Reads `tools.jsonl`, `queries.jsonl` and, when present, `scores.jsonl`
    /// from `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let scores = dir.join(SCORES_FILE);
        Self::load(
            &dir.join(TOOLS_FILE),
            &dir.join(QUERIES_FILE),
            scores.exists().then_some(scores.as_path()),
        )
    }

    pub fn load(tools: &Path, queries: &Path, scores: Option<&Path>) -> Result<Self> {
        let registry: Vec<Tool> = read_jsonl(tools)?;
        let queries: Vec<Query> = read_jsonl(queries)?;
        let scores = scores.map(|p| load_scores(p, &registry)).transpose()?;
        Self::new(registry, queries, scores)
    }

    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_jsonl(&dir.join(TOOLS_FILE), &self.registry)?;
        write_jsonl(&dir.join(QUERIES_FILE), &self.queries)?;
        if let Some(scores) = &self.scores {
            let ordered = self.queries.iter().map(|q| &scores[&q.query_id]);
            save_scores(&dir.join(SCORES_FILE), ordered)?;
        }
        Ok(())
    }
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::data(&name, format!("line {}: {e}", i + 1)))?);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| Error::io(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Deterministic train/test partition of `0..n`, both halves in ascending
/// order. The train share is `round(train_fraction * n)`, kept inside
/// `[1, n - 1]` whenever `n >= 2`.
pub fn split(n: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::config(format!(
            "train_fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut take = (train_fraction * n as f64).round() as usize;
    if n >= 2 {
        take = take.clamp(1, n - 1);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = shuffled(n, &mut rng);
    let mut train = order[..take].to_vec();
    let mut test = order[take..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}
