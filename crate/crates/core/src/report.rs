//! Aggregation of episode traces into summary, bucket and per-R tables.
//!
//! CSV floats use Rust's shortest round-trip decimal form, so rewriting a
//! report from the same traces reproduces the files byte for byte.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::EpisodeTrace;
use crate::error::{Error, Result};
use crate::harness::buckets::{bucketize, BucketScheme, BUCKET_LABELS};
use crate::metric::{aggregate_bor, Bits};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StdConvention {
    /// Divide by `n - 1`.
    #[default]
    Sample,
    /// Divide by `n`.
    Population,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeedRun {
    pub seed: u64,
    pub traces: Vec<EpisodeTrace>,
}

/// Evaluation traces of one method across seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodRun {
    pub method: String,
    /// Deterministic methods report no across-seed spread.
    pub deterministic: bool,
    pub seeds: Vec<SeedRun>,
}

/// Mean with an optional across-seed deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeedSummary {
    pub seed: u64,
    pub n: usize,
    pub found_pct: f64,
    pub mean_k: f64,
    /// Spread of chosen depth across queries.
    pub k_std_within: f64,
    /// Mean terminal reward over found episodes.
    pub reward_bits: Option<f64>,
    pub aggregate_bor: Bits,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodSummary {
    pub method: String,
    pub deterministic: bool,
    pub seeds: Vec<SeedSummary>,
    pub found_pct: Stat,
    pub mean_k: Stat,
    pub k_std_within: f64,
    pub reward_bits: Option<f64>,
    pub aggregate_bor: Bits,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BucketRow {
    pub method: String,
    pub bucket: usize,
    pub n: usize,
    /// Seed means; `None` for an empty bucket.
    pub found_pct: Option<f64>,
    pub mean_k: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RqRow {
    pub method: String,
    pub relevant: usize,
    pub n: usize,
    pub found_pct: f64,
    pub mean_k: f64,
    pub aggregate_bor: Bits,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub condition: String,
    pub scheme: BucketScheme,
    pub corpus_size: usize,
    pub methods: Vec<MethodSummary>,
    pub buckets: Vec<BucketRow>,
    pub per_rq: Vec<RqRow>,
    pub runs: Vec<MethodRun>,
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

pub fn std_dev(xs: &[f64], convention: StdConvention) -> f64 {
    let m = mean(xs.iter().copied());
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    let denom = match convention {
        StdConvention::Sample => xs.len().saturating_sub(1),
        StdConvention::Population => xs.len(),
    };
    if denom == 0 {
        0.0
    } else {
        (ss / denom as f64).sqrt()
    }
}

fn found_pct(traces: &[&EpisodeTrace]) -> f64 {
    100.0 * traces.iter().filter(|t| t.found).count() as f64 / traces.len() as f64
}

fn mean_depth(traces: &[&EpisodeTrace]) -> f64 {
    mean(traces.iter().map(|t| t.depth as f64))
}

fn pooled_bor(traces: &[&EpisodeTrace], corpus_size: usize) -> Result<Bits> {
    let owned: Vec<EpisodeTrace> = traces.iter().map(|&t| t.clone()).collect();
    aggregate_bor(&owned, corpus_size as u64)
}

fn summarize_seed(run: &SeedRun, corpus_size: usize) -> Result<SeedSummary> {
    let traces: Vec<&EpisodeTrace> = run.traces.iter().collect();
    let depths: Vec<f64> = traces.iter().map(|t| t.depth as f64).collect();
    let found: Vec<f64> = traces.iter().filter(|t| t.found).map(|t| t.terminal_reward).collect();
    Ok(SeedSummary {
        seed: run.seed,
        n: traces.len(),
        found_pct: found_pct(&traces),
        mean_k: mean(depths.iter().copied()),
        k_std_within: std_dev(&depths, StdConvention::Population),
        reward_bits: (!found.is_empty()).then(|| mean(found.iter().copied())),
        aggregate_bor: pooled_bor(&traces, corpus_size)?,
    })
}

fn across(values: &[f64], deterministic: bool, convention: StdConvention) -> Stat {
    Stat {
        mean: mean(values.iter().copied()),
        std: (!deterministic && values.len() > 1).then(|| std_dev(values, convention)),
    }
}

/// Aggregates per-seed traces of each method.
///
/// Every seed of every method must cover the same test queries, all drawn
/// from candidate sets of one size.
pub fn summarize(
    condition: &str,
    scheme: BucketScheme,
    convention: StdConvention,
    runs: Vec<MethodRun>,
) -> Result<EvalReport> {
    let first = runs
        .first()
        .and_then(|r| r.seeds.first())
        .and_then(|s| s.traces.first())
        .ok_or_else(|| Error::domain("nothing to summarize: need one method, seed and trace"))?;
    let corpus_size = first.candidate_count;
    let query_count = runs[0].seeds[0].traces.len();
    for run in &runs {
        for seed in &run.seeds {
            if seed.traces.len() != query_count {
                return Err(Error::data(
                    &run.method,
                    format!(
                        "seed {} has {} traces, expected {query_count}",
                        seed.seed,
                        seed.traces.len()
                    ),
                ));
            }
            if seed.traces.iter().any(|t| t.candidate_count != corpus_size) {
                return Err(Error::data(&run.method, "candidate sets differ in size"));
            }
        }
        if run.seeds.is_empty() {
            return Err(Error::data(&run.method, "no seeds"));
        }
    }

    let mut methods = Vec::with_capacity(runs.len());
    let mut buckets = Vec::new();
    let mut per_rq = Vec::new();
    for run in &runs {
        let seeds = run
            .seeds
            .iter()
            .map(|s| summarize_seed(s, corpus_size))
            .collect::<Result<Vec<_>>>()?;
        let col = |f: fn(&SeedSummary) -> f64| seeds.iter().map(f).collect::<Vec<f64>>();
        let rewards: Vec<f64> = seeds.iter().filter_map(|s| s.reward_bits).collect();
        methods.push(MethodSummary {
            method: run.method.clone(),
            deterministic: run.deterministic,
            found_pct: across(&col(|s| s.found_pct), run.deterministic, convention),
            mean_k: across(&col(|s| s.mean_k), run.deterministic, convention),
            k_std_within: mean(col(|s| s.k_std_within)),
            reward_bits: (!rewards.is_empty()).then(|| mean(rewards)),
            aggregate_bor: Bits::new(mean(col(|s| s.aggregate_bor.value()))),
            seeds,
        });

        for bucket in 0..BUCKET_LABELS.len() {
            let per_seed: Vec<Vec<&EpisodeTrace>> = run
                .seeds
                .iter()
                .map(|s| {
                    s.traces
                        .iter()
                        .filter(|t| bucketize(t.gold_rank, scheme) == bucket)
                        .collect()
                })
                .collect();
            let n = per_seed[0].len();
            let filled = n > 0;
            buckets.push(BucketRow {
                method: run.method.clone(),
                bucket,
                n,
                found_pct: filled.then(|| mean(per_seed.iter().map(|t| found_pct(t)))),
                mean_k: filled.then(|| mean(per_seed.iter().map(|t| mean_depth(t)))),
            });
        }

        let mut by_rq: BTreeMap<usize, Vec<Vec<&EpisodeTrace>>> = BTreeMap::new();
        for (i, s) in run.seeds.iter().enumerate() {
            for t in &s.traces {
                let slot = by_rq
                    .entry(t.relevant)
                    .or_insert_with(|| vec![Vec::new(); run.seeds.len()]);
                slot[i].push(t);
            }
        }
        for (relevant, per_seed) in by_rq {
            let bors = per_seed
                .iter()
                .map(|t| pooled_bor(t, corpus_size).map(Bits::value))
                .collect::<Result<Vec<f64>>>()?;
            per_rq.push(RqRow {
                method: run.method.clone(),
                relevant,
                n: per_seed[0].len(),
                found_pct: mean(per_seed.iter().map(|t| found_pct(t))),
                mean_k: mean(per_seed.iter().map(|t| mean_depth(t))),
                aggregate_bor: Bits::new(mean(bors)),
            });
        }
    }
    Ok(EvalReport {
        condition: condition.to_string(),
        scheme,
        corpus_size,
        methods,
        buckets,
        per_rq,
        runs,
    })
}

/// Shortest round-trip decimal; `-inf` for the zero-success marker.
pub fn fmt_f64(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Files written by [`EvalReport::emit_csv`] and [`EvalReport::write_text`].
pub const REPORT_FILES: [&str; 7] = [
    "summary.csv",
    "per_seed.csv",
    "buckets.csv",
    "per_rq.csv",
    "plot_buckets.csv",
    "traces.csv",
    "summary.txt",
];

pub const SUMMARY_HEADER: [&str; 11] = [
    "condition",
    "method",
    "seeds",
    "n",
    "found_pct",
    "found_pct_std",
    "mean_k",
    "mean_k_std",
    "k_std_within",
    "reward_bits",
    "aggregate_bor",
];

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::io(path, std::io::Error::other(e))
}

impl EvalReport {
    pub fn method(&self, name: &str) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == name)
    }

    pub fn bucket_rows<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a BucketRow> + 'a {
        self.buckets.iter().filter(move |b| b.method == method)
    }

    pub fn summary_records(&self) -> Vec<Vec<String>> {
        self.methods
            .iter()
            .map(|m| {
                vec![
                    self.condition.clone(),
                    m.method.clone(),
                    m.seeds.len().to_string(),
                    m.seeds[0].n.to_string(),
                    fmt_f64(m.found_pct.mean),
                    fmt_opt(m.found_pct.std),
                    fmt_f64(m.mean_k.mean),
                    fmt_opt(m.mean_k.std),
                    fmt_f64(m.k_std_within),
                    fmt_opt(m.reward_bits),
                    fmt_f64(m.aggregate_bor.value()),
                ]
            })
            .collect()
    }

    /// Writes `summary.csv`, `per_seed.csv`, `buckets.csv`, `per_rq.csv`,
    /// `plot_buckets.csv` and `traces.csv` into `dir`, overwriting.
    pub fn emit_csv(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

        let path = dir.join("summary.csv");
        let mut w = csv_writer(&path)?;
        w.write_record(SUMMARY_HEADER).map_err(csv_err(&path))?;
        for rec in self.summary_records() {
            w.write_record(rec).map_err(csv_err(&path))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        let path = dir.join("per_seed.csv");
        let mut w = csv_writer(&path)?;
        w.write_record([
            "condition",
            "method",
            "seed",
            "n",
            "found_pct",
            "mean_k",
            "k_std_within",
            "reward_bits",
            "aggregate_bor",
        ])
        .map_err(csv_err(&path))?;
        for m in &self.methods {
            for s in &m.seeds {
                w.write_record([
                    self.condition.clone(),
                    m.method.clone(),
                    s.seed.to_string(),
                    s.n.to_string(),
                    fmt_f64(s.found_pct),
                    fmt_f64(s.mean_k),
                    fmt_f64(s.k_std_within),
                    fmt_opt(s.reward_bits),
                    fmt_f64(s.aggregate_bor.value()),
                ])
                .map_err(csv_err(&path))?;
            }
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        let path = dir.join("buckets.csv");
        let mut w = csv_writer(&path)?;
        w.write_record([
            "condition",
            "method",
            "scheme",
            "bucket",
            "ranks",
            "n",
            "found_pct",
            "mean_k",
        ])
        .map_err(csv_err(&path))?;
        for b in &self.buckets {
            w.write_record([
                self.condition.clone(),
                b.method.clone(),
                self.scheme.as_str().to_string(),
                BUCKET_LABELS[b.bucket].to_string(),
                self.scheme.range_label(b.bucket),
                b.n.to_string(),
                fmt_opt(b.found_pct),
                fmt_opt(b.mean_k),
            ])
            .map_err(csv_err(&path))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        let path = dir.join("per_rq.csv");
        let mut w = csv_writer(&path)?;
        w.write_record([
            "condition",
            "method",
            "relevant",
            "n",
            "found_pct",
            "mean_k",
            "aggregate_bor",
        ])
        .map_err(csv_err(&path))?;
        for r in &self.per_rq {
            w.write_record([
                self.condition.clone(),
                r.method.clone(),
                r.relevant.to_string(),
                r.n.to_string(),
                fmt_f64(r.found_pct),
                fmt_f64(r.mean_k),
                fmt_f64(r.aggregate_bor.value()),
            ])
            .map_err(csv_err(&path))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        // One row per bucket, two columns per method: ready for a grouped
        // bar chart of depth and success by difficulty.
        let path = dir.join("plot_buckets.csv");
        let mut w = csv_writer(&path)?;
        let mut header = vec!["bucket".to_string(), "ranks".to_string()];
        for m in &self.methods {
            header.push(format!("{}_mean_k", m.method));
            header.push(format!("{}_found_pct", m.method));
        }
        w.write_record(&header).map_err(csv_err(&path))?;
        for bucket in 0..BUCKET_LABELS.len() {
            let mut rec = vec![BUCKET_LABELS[bucket].to_string(), self.scheme.range_label(bucket)];
            for m in &self.methods {
                let row = self
                    .bucket_rows(&m.method)
                    .find(|b| b.bucket == bucket)
                    .expect("every method has every bucket");
                rec.push(fmt_opt(row.mean_k));
                rec.push(fmt_opt(row.found_pct));
            }
            w.write_record(&rec).map_err(csv_err(&path))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        let path = dir.join("traces.csv");
        let mut w = csv_writer(&path)?;
        w.write_record([
            "method",
            "seed",
            "query_id",
            "depth",
            "found",
            "gold_rank",
            "bucket",
            "relevant",
            "terminal_reward",
            "episode_return",
        ])
        .map_err(csv_err(&path))?;
        for run in &self.runs {
            for s in &run.seeds {
                for t in &s.traces {
                    w.write_record([
                        run.method.clone(),
                        s.seed.to_string(),
                        t.query_id.clone(),
                        t.depth.to_string(),
                        t.found.to_string(),
                        t.gold_rank.map(|r| r.to_string()).unwrap_or_default(),
                        BUCKET_LABELS[bucketize(t.gold_rank, self.scheme)].to_string(),
                        t.relevant.to_string(),
                        fmt_f64(t.terminal_reward),
                        fmt_f64(t.episode_return),
                    ])
                    .map_err(csv_err(&path))?;
                }
            }
        }
        w.flush().map_err(|e| Error::io(&path, e))
    }

    pub fn write_text(&self, dir: &Path) -> Result<()> {
        let path = dir.join("summary.txt");
        let mut f = File::create(&path).map_err(|e| Error::io(&path, e))?;
        write!(f, "{self}").map_err(|e| Error::io(&path, e))
    }
}

/// Writes the summary rows of several conditions into one table.
pub fn write_combined_summary(path: &Path, reports: &[&EvalReport]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(SUMMARY_HEADER).map_err(csv_err(path))?;
    for r in reports {
        for rec in r.summary_records() {
            w.write_record(rec).map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn pm(s: &Stat) -> String {
    match s.std {
        Some(sd) => format!("{:.1} ± {:.1}", s.mean, sd),
        None => format!("{:.1}", s.mean),
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.methods.first().map_or(0, |m| m.seeds[0].n);
        writeln!(
            f,
            "condition {} (N = {}, {} test queries)",
            self.condition, self.corpus_size, n
        )?;
        writeln!(
            f,
            "{:<20} {:>14} {:>12} {:>8} {:>8} {:>8}",
            "method", "found %", "K", "K sd", "bits", "BoR"
        )?;
        for m in &self.methods {
            writeln!(
                f,
                "{:<20} {:>14} {:>12} {:>8.1} {:>8} {:>8}",
                m.method,
                pm(&m.found_pct),
                pm(&m.mean_k),
                m.k_std_within,
                m.reward_bits.map_or("-".into(), |b| format!("{b:.2}")),
                format!("{:.2}", m.aggregate_bor),
            )?;
        }
        writeln!(f)?;
        writeln!(f, "mean K by {} bucket (found %)", self.scheme.as_str())?;
        write!(f, "{:<20}", "method")?;
        for b in 0..BUCKET_LABELS.len() {
            write!(
                f,
                " {:>16}",
                format!("{} ({})", BUCKET_LABELS[b], self.scheme.range_label(b))
            )?;
        }
        writeln!(f)?;
        for m in &self.methods {
            write!(f, "{:<20}", m.method)?;
            for row in self.bucket_rows(&m.method) {
                let cell = match (row.mean_k, row.found_pct) {
                    (Some(k), Some(p)) => format!("{k:.1} ({p:.1})"),
                    _ => "n=0".into(),
                };
                write!(f, " {cell:>16}")?;
            }
            writeln!(f)?;
        }
        write!(f, "{:<20}", "queries")?;
        if let Some(m) = self.methods.first() {
            for row in self.bucket_rows(&m.method) {
                write!(f, " {:>16}", row.n)?;
            }
        }
        writeln!(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn trace(depth: usize, gold_rank: usize, n: usize) -> EpisodeTrace {
        let found = gold_rank <= depth;
        EpisodeTrace {
            query_id: format!("q{gold_rank}_{depth}"),
            depth,
            found,
            terminal_reward: if found { (n as f64 / depth as f64).log2() } else { 0.0 },
            episode_return: 0.0,
            gold_rank: Some(gold_rank),
            relevant: 1,
            candidate_count: n,
        }
    }

    fn run(name: &str, det: bool, seeds: Vec<Vec<EpisodeTrace>>) -> MethodRun {
        MethodRun {
            method: name.into(),
            deterministic: det,
            seeds: seeds
                .into_iter()
                .enumerate()
                .map(|(i, traces)| SeedRun { seed: i as u64, traces })
                .collect(),
        }
    }

    #[test]
    fn all_found_at_one() {
        let traces = vec![trace(1, 1, 100); 10];
        let r = summarize(
            "c",
            BucketScheme::Wide,
            StdConvention::Sample,
            vec![run("m", false, vec![traces])],
        )
        .unwrap();
        let m = &r.methods[0];
        assert_eq!(m.found_pct.mean, 100.0);
        assert_eq!(m.mean_k.mean, 1.0);
        assert_eq!(m.found_pct.std, None);
        assert_abs_diff_eq!(m.reward_bits.unwrap(), 6.643856, epsilon = 1e-6);
    }

    #[test]
    fn seed_spread_conventions() {
        // Two seeds over 50 queries: 45 and 46 found, i.e. 90% and 92%.
        let seed = |found: usize| -> Vec<EpisodeTrace> {
            (0..50).map(|i| trace(3, if i < found { 1 } else { 9 }, 100)).collect()
        };
        let runs = || vec![run("m", false, vec![seed(45), seed(46)])];
        let sample = summarize("c", BucketScheme::Wide, StdConvention::Sample, runs()).unwrap();
        assert_abs_diff_eq!(sample.methods[0].found_pct.mean, 91.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sample.methods[0].found_pct.std.unwrap(), 2f64.sqrt(), epsilon = 1e-12);
        let pop = summarize("c", BucketScheme::Wide, StdConvention::Population, runs()).unwrap();
        assert_abs_diff_eq!(pop.methods[0].found_pct.std.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn deterministic_methods_have_no_spread() {
        let t = vec![trace(5, 2, 100), trace(5, 9, 100)];
        let r = summarize(
            "c",
            BucketScheme::Wide,
            StdConvention::Sample,
            vec![run("fk5", true, vec![t.clone(), t])],
        )
        .unwrap();
        assert_eq!(r.methods[0].found_pct.std, None);
        assert_eq!(r.methods[0].mean_k.std, None);
        assert_eq!(r.methods[0].k_std_within, 0.0);
    }

    #[test]
    fn buckets_partition_and_empty_bucket() {
        let t = vec![trace(1, 1, 100), trace(3, 2, 100), trace(3, 4, 100), trace(7, 7, 100)];
        let r = summarize(
            "c",
            BucketScheme::Wide,
            StdConvention::Sample,
            vec![run("m", false, vec![t])],
        )
        .unwrap();
        let rows: Vec<&BucketRow> = r.bucket_rows("m").collect();
        assert_eq!(rows.iter().map(|b| b.n).collect::<Vec<_>>(), [1, 2, 1, 0]);
        assert_eq!(rows[3].found_pct, None);
        assert_eq!(rows[1].found_pct, Some(50.0));
        let weighted: f64 = rows
            .iter()
            .filter_map(|b| b.found_pct.map(|p| p * b.n as f64))
            .sum::<f64>()
            / 4.0;
        assert_abs_diff_eq!(weighted, r.methods[0].found_pct.mean, epsilon = 1e-9);

        let dir = tempfile::tempdir().unwrap();
        r.emit_csv(dir.path()).unwrap();
        let buckets = std::fs::read_to_string(dir.path().join("buckets.csv")).unwrap();
        assert!(
            buckets.lines().last().unwrap().ends_with("very_hard,21+,0,,"),
            "{buckets}"
        );
        let header = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert!(header.starts_with("condition,method,seeds,n,found_pct,found_pct_std,mean_k,"));
        let first: Vec<Vec<u8>> = ["summary.csv", "buckets.csv", "per_rq.csv", "traces.csv"]
            .iter()
            .map(|f| std::fs::read(dir.path().join(f)).unwrap())
            .collect();
        r.emit_csv(dir.path()).unwrap();
        let second: Vec<Vec<u8>> = ["summary.csv", "buckets.csv", "per_rq.csv", "traces.csv"]
            .iter()
            .map(|f| std::fs::read(dir.path().join(f)).unwrap())
            .collect();
        assert_eq!(first, second);
    }

    #[test]
    fn aggregate_matches_metric() {
        let t = vec![trace(4, 1, 100), trace(2, 7, 100), trace(10, 3, 100)];
        let r = summarize(
            "c",
            BucketScheme::Narrow,
            StdConvention::Sample,
            vec![run("m", false, vec![t.clone()])],
        )
        .unwrap();
        assert_eq!(r.methods[0].aggregate_bor, aggregate_bor(&t, 100).unwrap());
        assert_eq!(r.per_rq.len(), 1);
        assert_eq!(r.per_rq[0].aggregate_bor, r.methods[0].aggregate_bor);
    }
}
