use serde::{Deserialize, Serialize};

use super::{build_candidate_set, split, Benchmark, BucketScheme, CandidateSpec};
use crate::agents::{rollout, train, Learner, Policy, TrainingLog};
use crate::env::{Episode, EpisodeConfig, EpisodeTrace, RelevantCount, RewardKind};
use crate::error::{Error, Result};
use crate::report::{summarize, EvalReport, MethodRun, SeedRun, StdConvention};
use crate::scorer::{rank, Bm25Index, Bm25Params, ScoreVector};

/// One row of a comparison: a learner plus optional episode overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Method {
    pub name: String,
    pub learner: Learner,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward_kind: Option<RewardKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_cost: Option<f64>,
}

impl Method {
    pub fn new(name: impl Into<String>, learner: Learner) -> Self {
        Self {
            name: name.into(),
            learner,
            reward_kind: None,
            gamma: None,
            step_cost: None,
        }
    }

    pub fn with_reward(mut self, kind: RewardKind) -> Self {
        self.reward_kind = Some(kind);
        self
    }

    /// Training configuration: the shared one with this method's overrides.
    pub fn train_config(&self, base: &EpisodeConfig) -> EpisodeConfig {
        EpisodeConfig {
            reward_kind: self.reward_kind.unwrap_or(base.reward_kind),
            gamma: self.gamma.unwrap_or(base.gamma),
            step_cost: self.step_cost.unwrap_or(base.step_cost),
            relevant_count: base.relevant_count,
        }
    }

    /// Evaluation scores every method in BoR bits with one relevant tool
    /// assumed, whatever reward it was trained on.
    pub fn eval_config(&self, base: &EpisodeConfig) -> EpisodeConfig {
        EpisodeConfig {
            reward_kind: RewardKind::Bor,
            relevant_count: RelevantCount::AssumeOne,
            ..self.train_config(base)
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self.learner, Learner::Fixed { .. })
    }

    /// Fixed-K at 1 and 5, then tabular Q-learning on BoR and on F1.
    pub fn standard_set() -> Vec<Method> {
        vec![
            Method::new("fixed_k1", Learner::Fixed { k: 1 }),
            Method::new("fixed_k5", Learner::Fixed { k: 5 }),
            Method::new("bor_q", Learner::Tabular(Default::default())).with_reward(RewardKind::Bor),
            Method::new("f1_q", Learner::Tabular(Default::default())).with_reward(RewardKind::F1),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub episode: EpisodeConfig,
    pub candidates: CandidateSpec,
    pub candidate_seed: u64,
    pub train_fraction: f64,
    pub split_seed: u64,
    pub seeds: Vec<u64>,
    pub buckets: BucketScheme,
    pub bm25: Bm25Params,
    pub std_convention: StdConvention,
    pub methods: Vec<Method>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            episode: EpisodeConfig::default(),
            candidates: CandidateSpec::default(),
            candidate_seed: 0,
            train_fraction: 0.7,
            split_seed: 0,
            seeds: vec![0, 1, 2],
            buckets: BucketScheme::Wide,
            bm25: Bm25Params::default(),
            std_convention: StdConvention::Sample,
            methods: Method::standard_set(),
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.episode.validate()?;
        if self.methods.is_empty() {
            return Err(Error::config("experiment has no methods"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("experiment has no seeds"));
        }
        let mut names = std::collections::BTreeSet::new();
        if let Some(m) = self.methods.iter().find(|m| !names.insert(m.name.as_str())) {
            return Err(Error::config(format!("duplicate method name {:?}", m.name)));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::config(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        for m in &self.methods {
            m.train_config(&self.episode).validate()?;
        }
        Ok(())
    }
}

/// Train and test episodes of one condition.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub train: Vec<Episode>,
    pub test: Vec<Episode>,
}

/// Scores every query, cuts candidate sets, re-ranks within each set and
/// splits into train and test.
///
/// Preloaded scores are used when the benchmark has them; otherwise BM25
/// over the registry.
pub fn prepare_episodes(benchmark: &Benchmark, spec: &ExperimentSpec) -> Result<Prepared> {
    let bm25 = match &benchmark.scores {
        Some(_) => None,
        None => Some(Bm25Index::build(&benchmark.registry, spec.bm25)?),
    };
    let mut episodes = Vec::with_capacity(benchmark.queries.len());
    for (i, query) in benchmark.queries.iter().enumerate() {
        let computed;
        let scores: &ScoreVector = match (&benchmark.scores, &bm25) {
            (Some(all), _) => &all[&query.query_id],
            (None, Some(index)) => {
                computed = index.score(&query.query_id, &query.text);
                &computed
            }
            (None, None) => unreachable!("index built when scores are absent"),
        };
        let set = build_candidate_set(
            query,
            &benchmark.registry,
            scores,
            &spec.candidates,
            spec.candidate_seed,
            i as u64,
        )?;
        episodes.push(Episode {
            query_id: query.query_id.clone(),
            ranked: rank(&scores.restrict(&set.members)),
            gold: query.gold_ids.clone(),
        });
    }
    let (train_idx, test_idx) = split(episodes.len(), spec.train_fraction, spec.split_seed)?;
    let take = |idx: Vec<usize>| idx.into_iter().map(|i| episodes[i].clone()).collect();
    Ok(Prepared {
        train: take(train_idx),
        test: take(test_idx),
    })
}

pub fn evaluate(policy: &Policy, test: &[Episode], cfg: &EpisodeConfig) -> Result<Vec<EpisodeTrace>> {
    test.iter().map(|ep| rollout(policy, ep, cfg)).collect()
}

/// Trains one policy, with the method and seed attached to any error.
pub fn train_method(
    method: &Method,
    spec: &ExperimentSpec,
    train_set: &[Episode],
    seed: u64,
) -> Result<(Policy, TrainingLog)> {
    let cfg = method.train_config(&spec.episode);
    train(&method.learner, train_set, &cfg, seed).map_err(|e| match e {
        Error::Training(msg) => Error::Training(format!("{} (seed {seed}): {msg}", method.name)),
        Error::Config(msg) => Error::Config(format!("{}: {msg}", method.name)),
        other => other,
    })
}

/// Every method trained under every seed and evaluated on the test split.
pub fn run_experiment(benchmark: &Benchmark, spec: &ExperimentSpec) -> Result<EvalReport> {
    run_experiment_with(benchmark, spec, |method, seed, train_set| {
        train_method(method, spec, train_set, seed).map(|(policy, _)| policy)
    })
}

/// Like [`run_experiment`], with policies supplied by `policy_for` (for
/// example loaded from disk) instead of trained in place.
///
/// (method, seed) cells may run in parallel; results are merged in spec
/// order, so the report does not depend on scheduling.
pub fn run_experiment_with<F>(benchmark: &Benchmark, spec: &ExperimentSpec, policy_for: F) -> Result<EvalReport>
where
    F: Fn(&Method, u64, &[Episode]) -> Result<Policy> + Sync,
{
    spec.validate()?;
    let data = prepare_episodes(benchmark, spec)?;
    let cells: Vec<(usize, u64)> = (0..spec.methods.len())
        .flat_map(|m| spec.seeds.iter().map(move |&s| (m, s)))
        .collect();
    let results = crate::par_map(&cells, |&(m, seed)| {
        let method = &spec.methods[m];
        let policy = policy_for(method, seed, &data.train)?;
        Ok(SeedRun {
            seed,
            traces: evaluate(&policy, &data.test, &method.eval_config(&spec.episode))?,
        })
    });
    let mut results = results.into_iter();
    let mut runs = Vec::with_capacity(spec.methods.len());
    for method in &spec.methods {
        let seeds = results.by_ref().take(spec.seeds.len()).collect::<Result<Vec<_>>>()?;
        runs.push(MethodRun {
            method: method.name.clone(),
            deterministic: method.is_deterministic(),
            seeds,
        });
    }
    summarize(&spec.name, spec.buckets, spec.std_convention, runs)
}
