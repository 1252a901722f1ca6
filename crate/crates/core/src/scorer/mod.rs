//! Ranking candidate tools for a query.
//!
//! [`bm25`] is the built-in lexical scorer. [`score_file`] ingests scores
//! computed elsewhere (e.g. by an embedding exporter) in a shared JSONL format.

pub mod bm25;
pub mod score_file;
pub mod tokenize;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub use bm25::{Bm25Index, Bm25Params};
pub use score_file::{load_scores, read_scores, write_scores};
pub use tokenize::tokenize;

/// One candidate tool.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tool {
    pub id: String,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub parameters: Vec<String>,
}

/// Scores for every candidate of one query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub query_id: String,
    pub entries: Vec<(String, f64)>,
}

impl ScoreVector {
    /// Keeps only the listed tool ids, in the order given.
    pub fn restrict(&self, members: &[String]) -> ScoreVector {
        let mut entries = Vec::with_capacity(members.len());
        for m in members {
            if let Some((id, s)) = self.entries.iter().find(|(id, _)| id == m) {
                entries.push((id.clone(), *s));
            }
        }
        ScoreVector {
            query_id: self.query_id.clone(),
            entries,
        }
    }

    pub fn score_of(&self, tool_id: &str) -> Option<f64> {
        self.entries.iter().find(|(id, _)| id == tool_id).map(|(_, s)| *s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub tool_id: String,
    pub score: f64,
}

/// Candidates in descending score order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    entries: Vec<RankedEntry>,
}

impl RankedList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[RankedEntry] {
        &self.entries
    }

    /// Score at 1-based rank.
    pub fn score_at(&self, rank: usize) -> f64 {
        self.entries[rank - 1].score
    }

    pub fn tool_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.tool_id.as_str())
    }

    /// 1-based rank of the best-ranked gold tool, if any gold tool is listed.
    pub fn best_rank<S: AsRef<str>>(&self, gold: &[S]) -> Option<usize> {
        let gold: HashSet<&str> = gold.iter().map(AsRef::as_ref).collect();
        self.entries
            .iter()
            .position(|e| gold.contains(e.tool_id.as_str()))
            .map(|i| i + 1)
    }

    /// The first `k` tool ids: the shortlist presented at depth `k`.
    pub fn shortlist(&self, k: usize) -> Vec<&str> {
        self.tool_ids().take(k).collect()
    }
}

/// Sorts by score descending, breaking ties by ascending tool id.
pub fn rank(v: &ScoreVector) -> RankedList {
    let mut entries: Vec<RankedEntry> = v
        .entries
        .iter()
        .map(|(id, s)| RankedEntry {
            tool_id: id.clone(),
            score: *s,
        })
        .collect();
    entries.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.tool_id.cmp(&b.tool_id)));
    RankedList { entries }
}
