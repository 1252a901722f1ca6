use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use bor_depth::agents::serialize::{load_policy, policy_path, save_policy};
use bor_depth::config::{
    apply_overrides, in_pool, run_sweep, write_report, Manifest, Override, Sweep, SyntheticSource, MANIFEST_FILE,
};
use bor_depth::harness::{
    generate_synthetic, prepare_episodes, read_jsonl, run_experiment, run_experiment_with, train_method, Benchmark,
    Query, QUERIES_FILE, SCORES_FILE, TOOLS_FILE,
};
use bor_depth::report::fmt_f64;
use bor_depth::scorer::score_file::save_scores;
use bor_depth::scorer::{Bm25Index, Bm25Params, Tool};
use bor_depth::{par_map, Error, Result};
use serde::{Deserialize, Serialize};

pub fn load(config: &Path, sets: &[Override]) -> Result<Sweep> {
    Sweep::load(config, sets)
}

fn absolute(p: &Path) -> Result<PathBuf> {
    std::path::absolute(p).map_err(|e| Error::io(p, e))
}

pub fn synth(out: &Path, preset: &str, seed: u64, sets: &[Override]) -> Result<()> {
    let source = apply_overrides(&SyntheticSource::new(preset, seed), sets)?.resolved()?;
    write_synth(out, &source)
}

fn write_synth(out: &Path, source: &SyntheticSource) -> Result<()> {
    let spec = source.spec()?;
    let bench = generate_synthetic(&spec, source.seed)?;
    bench.save_dir(out)?;
    let config = serde_json::to_value(source).expect("source serializes");
    Manifest::new("synth", config, BTreeMap::from([("data".into(), vec![source.seed])])).write(out)?;
    eprintln!(
        "wrote {} queries over {} tools to {}",
        bench.queries.len(),
        bench.registry.len(),
        out.display()
    );
    Ok(())
}

/// Inputs of a `score` run, as recorded in its manifest.
#[derive(Serialize, Deserialize)]
struct ScoreJob {
    bench: PathBuf,
    bm25: Bm25Params,
}

pub fn score(out: &Path, bench: &Path, k1: f64, b: f64) -> Result<()> {
    let job = ScoreJob {
        bench: absolute(bench)?,
        bm25: Bm25Params { k1, b },
    };
    run_score(out, &job)
}

fn run_score(out: &Path, job: &ScoreJob) -> Result<()> {
    let registry: Vec<Tool> = read_jsonl(&job.bench.join(TOOLS_FILE))?;
    let queries: Vec<Query> = read_jsonl(&job.bench.join(QUERIES_FILE))?;
    let bench = Benchmark::new(registry, queries, None)?;
    let index = Bm25Index::build(&bench.registry, job.bm25)?;
    let vectors: Vec<_> = bench
        .queries
        .iter()
        .map(|q| index.score(&q.query_id, &q.text))
        .collect();
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    save_scores(&out.join(SCORES_FILE), &vectors)?;
    let config = serde_json::to_value(job).expect("job serializes");
    Manifest::new("score", config, BTreeMap::new()).write(out)?;
    eprintln!(
        "scored {} queries against {} tools",
        vectors.len(),
        bench.registry.len()
    );
    Ok(())
}

pub fn train(out: &Path, sweep: &Sweep, jobs: usize) -> Result<()> {
    let cell = sweep.single()?;
    let spec = &cell.config.experiment;
    let benchmark = cell.config.benchmark.load()?;
    let data = prepare_episodes(&benchmark, spec)?;
    let pairs: Vec<_> = spec
        .methods
        .iter()
        .flat_map(|m| spec.seeds.iter().map(move |&s| (m, s)))
        .collect();
    let trained = in_pool(jobs, || {
        par_map(&pairs, |&(m, seed)| train_method(m, spec, &data.train, seed))
    })?;

    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let log_path = out.join("training_log.csv");
    let file = File::create(&log_path).map_err(|e| Error::io(&log_path, e))?;
    let mut log = csv::Writer::from_writer(BufWriter::new(file));
    let csv_err = |e: csv::Error| Error::io(&log_path, std::io::Error::other(e));
    log.write_record(["method", "seed", "epoch", "mean_return", "mean_depth", "found_rate"])
        .map_err(csv_err)?;
    for (&(m, seed), result) in pairs.iter().zip(trained) {
        let (policy, history) = result?;
        save_policy(&policy_path(out, &m.name, seed), &policy)?;
        for e in &history.epochs {
            log.write_record([
                m.name.clone(),
                seed.to_string(),
                e.epoch.to_string(),
                fmt_f64(e.mean_return),
                fmt_f64(e.mean_depth),
                fmt_f64(e.found_rate),
            ])
            .map_err(csv_err)?;
        }
    }
    log.flush().map_err(|e| Error::io(&log_path, e))?;
    Manifest::for_sweep("train", sweep).write(out)?;
    eprintln!(
        "trained {} policies on {} queries into {}",
        pairs.len(),
        data.train.len(),
        out.join("policies").display()
    );
    Ok(())
}

pub fn eval(out: &Path, sweep: &Sweep, policies: Option<&Path>, jobs: usize) -> Result<()> {
    let cell = sweep.single()?;
    let spec = &cell.config.experiment;
    let benchmark = cell.config.benchmark.load()?;
    let report = in_pool(jobs, || match policies {
        Some(dir) => run_experiment_with(&benchmark, spec, |m, seed, _| {
            load_policy(&policy_path(dir, &m.name, seed))
        }),
        None => run_experiment(&benchmark, spec),
    })??;
    write_report(&report, out)?;
    let mut manifest = Manifest::for_sweep("eval", sweep);
    if let Some(dir) = policies {
        warn_on_mismatch(dir, cell);
        manifest.inputs.insert("policies".into(), absolute(dir)?);
    }
    manifest.write(out)?;
    print!("{report}");
    Ok(())
}

/// Policies trained on different data or splits still evaluate, but the
/// numbers then mean something else; say so.
fn warn_on_mismatch(dir: &Path, cell: &bor_depth::config::Cell) {
    let Ok(trained) = Manifest::load(&dir.join(MANIFEST_FILE)).and_then(|m| m.sweep()) else {
        eprintln!("warning: no readable train manifest in {}", dir.display());
        return;
    };
    let Ok(t) = trained.single() else { return };
    let (a, b) = (&t.config, &cell.config);
    if a.benchmark != b.benchmark
        || a.experiment.candidates != b.experiment.candidates
        || a.experiment.split_seed != b.experiment.split_seed
        || a.experiment.train_fraction != b.experiment.train_fraction
    {
        eprintln!(
            "warning: policies in {} were trained on a different benchmark or split",
            dir.display()
        );
    }
}

pub fn sweep(out: &Path, sweep: &Sweep, jobs: usize) -> Result<()> {
    let outcomes = run_sweep(sweep, out, jobs)?;
    let mut first_err = None;
    for o in outcomes {
        match o.result {
            Ok(report) => println!("{report}"),
            Err(e) => {
                eprintln!("cell {} failed: {e}", o.name);
                first_err.get_or_insert(e);
            }
        }
    }
    first_err.map_or(Ok(()), Err)
}

pub fn replay(out: &Path, manifest: &Path, jobs: usize) -> Result<()> {
    let m = Manifest::load(manifest)?;
    let bad = |e: serde_json::Error| Error::config(format!("{}: {e}", manifest.display()));
    match m.command.as_str() {
        "synth" => write_synth(out, &serde_json::from_value(m.config.clone()).map_err(bad)?),
        "score" => run_score(out, &serde_json::from_value(m.config.clone()).map_err(bad)?),
        "train" => train(out, &m.sweep()?, jobs),
        "eval" => eval(out, &m.sweep()?, m.inputs.get("policies").map(PathBuf::as_path), jobs),
        "sweep" => sweep(out, &m.sweep()?, jobs),
        other => Err(Error::config(format!("manifest names unknown command {other:?}"))),
    }
}
