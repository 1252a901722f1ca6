use bor_depth::agents::Learner;
use bor_depth::config::SyntheticSource;
use bor_depth::env::{episode_return, EpisodeConfig, RewardKind};
use bor_depth::harness::buckets::BUCKET_LABELS;
use bor_depth::harness::{generate_synthetic, run_experiment, ExperimentSpec, Method};
use bor_depth::metric::{bor, bor_max, p_rand, SelectionContext};
use bor_depth::{Error, Result};
use serde::Serialize;

pub fn ceiling_curve(corpus_size: u64, relevant: u64, max_depth: u64) -> Result<Vec<f64>> {
    (1..=max_depth.min(corpus_size))
        .map(|k| Ok(bor_max(SelectionContext::new(corpus_size, relevant, k)?).value()))
        .collect()
}

pub fn shortlist_bits(corpus_size: u64, relevant: u64, depth: u64, found_rate: f64) -> Result<f64> {
    let ctx = SelectionContext::new(corpus_size, relevant, depth)?;
    Ok(bor(found_rate, p_rand(ctx))?.value())
}

pub fn stop_returns(
    kind: RewardKind,
    corpus_size: usize,
    gold_rank: Option<usize>,
    max_depth: usize,
    step_cost: f64,
    gamma: f64,
) -> Result<Vec<f64>> {
    let cfg = EpisodeConfig {
        reward_kind: kind,
        step_cost,
        gamma,
        ..EpisodeConfig::default()
    };
    cfg.validate()?;
    if corpus_size == 0 {
        return Err(Error::domain("corpus size must be positive"));
    }
    Ok((1..=max_depth.min(corpus_size))
        .map(|k| {
            let found = gold_rank.is_some_and(|g| g <= k);
            let mut rewards = vec![-step_cost; k - 1];
            rewards.push(cfg.terminal_reward(found, k, corpus_size, 1));
            episode_return(&rewards, gamma)
        })
        .collect())
}

#[derive(Debug, Serialize)]
pub struct Simulation {
    pub corpus_size: usize,
    pub test_queries: usize,
    pub buckets: Vec<String>,
    pub methods: Vec<MethodResult>,
}

#[derive(Debug, Serialize)]
pub struct MethodResult {
    pub name: String,
    pub found_pct: f64,
    pub mean_k: f64,
    pub aggregate_bor: f64,
    /// Per bucket: query count, found %, mean depth.
    pub buckets: Vec<(usize, Option<f64>, Option<f64>)>,
}

pub fn simulate(preset: &str, data_seed: u64, num_queries: usize, epochs: usize) -> Result<Simulation> {
    let mut source = SyntheticSource::new(preset, data_seed);
    source.num_queries = Some(num_queries);
    let bench = generate_synthetic(&source.spec()?, data_seed)?;
    let mut methods = Method::standard_set();
    for m in &mut methods {
        if let Learner::Tabular(hp) = &mut m.learner {
            hp.epochs = epochs;
        }
    }
    let spec = ExperimentSpec {
        seeds: vec![0],
        methods,
        ..ExperimentSpec::default()
    };
    let report = run_experiment(&bench, &spec)?;
    let scheme = spec.buckets;
    Ok(Simulation {
        corpus_size: report.corpus_size,
        test_queries: report.runs.first().map_or(0, |r| r.seeds[0].traces.len()),
        buckets: (0..BUCKET_LABELS.len())
            .map(|b| format!("{} ({})", BUCKET_LABELS[b], scheme.range_label(b)))
            .collect(),
        methods: report
            .methods
            .iter()
            .map(|m| MethodResult {
                name: m.method.clone(),
                found_pct: m.found_pct.mean,
                mean_k: m.mean_k.mean,
                aggregate_bor: m.aggregate_bor.value(),
                buckets: report
                    .bucket_rows(&m.method)
                    .map(|r| (r.n, r.found_pct, r.mean_k))
                    .collect(),
            })
            .collect(),
    })
}
