//! Okapi BM25 over tool name, description and parameter names.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::tokenize::tokenize;
use super::{ScoreVector, Tool};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bm25Params {
    /// Term-frequency saturation.
    pub k1: f64,
    /// Length normalization strength.
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Posting {
    doc: u32,
    tf: u32,
}

/// Immutable inverted index over a tool registry.
#[derive(Debug, Clone)]
pub struct Bm25Index {
    params: Bm25Params,
    tool_ids: Vec<String>,
    doc_lens: Vec<u32>,
    avg_doc_len: f64,
    terms: HashMap<String, usize>,
    postings: Vec<Vec<Posting>>,
}

/// Text indexed for one tool.
pub fn tool_document(tool: &Tool) -> String {
    let mut doc = String::with_capacity(tool.name.len() + tool.description.len() + 16);
    doc.push_str(&tool.name);
    doc.push(' ');
    doc.push_str(&tool.description);
    for p in &tool.parameters {
        doc.push(' ');
        doc.push_str(p);
    }
    doc
}

impl Bm25Index {
    pub fn build(registry: &[Tool], params: Bm25Params) -> Result<Self> {
        if registry.is_empty() {
            return Err(Error::domain("cannot index an empty registry"));
        }
        if !(params.k1 >= 0.0 && (0.0..=1.0).contains(&params.b)) {
            return Err(Error::config(format!(
                "BM25 parameters out of range: k1={}, b={}",
                params.k1, params.b
            )));
        }
        let mut terms: HashMap<String, usize> = HashMap::new();
        let mut postings: Vec<Vec<Posting>> = Vec::new();
        let mut doc_lens = Vec::with_capacity(registry.len());

        for (doc, tool) in registry.iter().enumerate() {
            let tokens = tokenize(&tool_document(tool));
            doc_lens.push(tokens.len() as u32);
            let mut tf: Vec<(usize, u32)> = Vec::new();
            let mut seen: HashMap<usize, usize> = HashMap::new();
            for token in tokens {
                let next = terms.len();
                let term = *terms.entry(token).or_insert(next);
                if term == postings.len() {
                    postings.push(Vec::new());
                }
                match seen.get(&term) {
                    Some(&slot) => tf[slot].1 += 1,
                    None => {
                        seen.insert(term, tf.len());
                        tf.push((term, 1));
                    }
                }
            }
            for (term, count) in tf {
                postings[term].push(Posting {
                    doc: doc as u32,
                    tf: count,
                });
            }
        }

        let total: u64 = doc_lens.iter().map(|&l| l as u64).sum();
        let avg_doc_len = total as f64 / registry.len() as f64;
        Ok(Self {
            params,
            tool_ids: registry.iter().map(|t| t.id.clone()).collect(),
            doc_lens,
            avg_doc_len,
            terms,
            postings,
        })
    }

    pub fn num_docs(&self) -> usize {
        self.tool_ids.len()
    }

    pub fn avg_doc_len(&self) -> f64 {
        self.avg_doc_len
    }

    pub fn doc_len(&self, doc: usize) -> u32 {
        self.doc_lens[doc]
    }

    /// Non-negative idf: `ln(1 + (n - df + 0.5) / (df + 0.5))`.
    fn idf(&self, df: usize) -> f64 {
        let n = self.num_docs() as f64;
        let df = df as f64;
        libm::log(1.0 + (n - df + 0.5) / (df + 0.5))
    }

    /// Scores every tool. Each distinct query term counts once.
    pub fn score(&self, query_id: &str, query_text: &str) -> ScoreVector {
        let mut scores = vec![0.0f64; self.num_docs()];
        let mut query_terms: Vec<usize> = Vec::new();
        for token in tokenize(query_text) {
            if let Some(&term) = self.terms.get(&token) {
                if !query_terms.contains(&term) {
                    query_terms.push(term);
                }
            }
        }
        let Bm25Params { k1, b } = self.params;
        for term in query_terms {
            let postings = &self.postings[term];
            let idf = self.idf(postings.len());
            for p in postings {
                let tf = p.tf as f64;
                let len_norm = if self.avg_doc_len > 0.0 {
                    1.0 - b + b * self.doc_lens[p.doc as usize] as f64 / self.avg_doc_len
                } else {
                    1.0
                };
                scores[p.doc as usize] += idf * tf * (k1 + 1.0) / (tf + k1 * len_norm);
            }
        }
        ScoreVector {
            query_id: query_id.to_string(),
            entries: self.tool_ids.iter().cloned().zip(scores).collect(),
        }
    }
}
