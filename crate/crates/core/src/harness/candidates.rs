use std::collections::HashSet;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Query;
use crate::error::{Error, Result};
use crate::scorer::{rank, ScoreVector, Tool};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fill {
    /// Remaining slots are sampled uniformly from the rest of the registry.
    #[default]
    Random,
    /// Remaining slots go to the next-hardest distractors.
    None,
}

/// How to cut a per-query candidate set out of the registry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CandidateSpec {
    /// Candidate-set size; `None` keeps the whole registry.
    pub size: Option<usize>,
    /// Highest-scoring non-gold tools always included.
    pub hard_count: usize,
    pub fill: Fill,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSet {
    pub query_id: String,
    /// Gold first, then hard distractors by descending score, then fill.
    pub members: Vec<String>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Gold tools, the `hard_count` top-scoring distractors, then either a
/// uniform random fill or more top distractors up to `size`.
///
/// `stream` selects an independent random stream under `seed`, so each
/// query of a benchmark gets its own reproducible draw.
pub fn build_candidate_set(
    query: &Query,
    registry: &[Tool],
    scores: &ScoreVector,
    spec: &CandidateSpec,
    seed: u64,
    stream: u64,
) -> Result<CandidateSet> {
    let n = spec.size.unwrap_or(registry.len());
    let gold = query.gold_ids.len();
    if n > registry.len() || n == 0 {
        return Err(Error::config(format!(
            "candidate-set size {n} must lie in 1..={} (registry size)",
            registry.len()
        )));
    }
    if spec.hard_count + gold > n {
        return Err(Error::config(format!(
            "query {:?}: {} gold + {} hard distractors exceed candidate-set size {n}",
            query.query_id, gold, spec.hard_count
        )));
    }
    if n == registry.len() {
        return Ok(CandidateSet {
            query_id: query.query_id.clone(),
            members: registry.iter().map(|t| t.id.clone()).collect(),
        });
    }

    let gold_set: HashSet<&str> = query.gold_ids.iter().map(String::as_str).collect();
    let mut members: Vec<String> = query.gold_ids.clone();
    // Descending score, ties by id.
    let distractors: Vec<String> = rank(scores)
        .tool_ids()
        .filter(|id| !gold_set.contains(id))
        .map(str::to_owned)
        .collect();
    let hard = match spec.fill {
        Fill::Random => spec.hard_count,
        Fill::None => n - gold,
    };
    members.extend(distractors[..hard].iter().cloned());
    if spec.fill == Fill::Random {
        let rest = &distractors[hard..];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut picks = index::sample(&mut rng, rest.len(), n - members.len()).into_vec();
        picks.sort_unstable();
        members.extend(picks.into_iter().map(|i| rest[i].clone()));
    }
    Ok(CandidateSet {
        query_id: query.query_id.clone(),
        members,
    })
}
