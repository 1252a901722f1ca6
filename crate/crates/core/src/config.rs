//! Declarative run configuration, sweeps over it, and run manifests.
//!
//! A config is a TOML document:
//!
//! ```toml
//! name = "scorer-ablation"
//!
//! [benchmark]
//! synthetic = { preset = "strong", seed = 7 }   # or dir = "data/bench"
//!
//! [experiment]
//! seeds = [0, 1, 2]
//! candidates = { size = 50 }
//!
//! [[cell]]
//! name = "strong"
//!
//! [[cell]]
//! name = "weak"
//! benchmark.synthetic.preset = "weak"
//!
//! [grid]
//! "experiment.episode.reward_kind" = ["bor", "f1"]
//! ```
//!
//! Every `[[cell]]` is merged over the base document, then expanded over
//! the cartesian product of `[grid]`. Without cells or a grid the document
//! describes a single run. Relative paths are taken from the config file's
//! directory and stored absolute, so a manifest can be replayed from
//! anywhere.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{generate_synthetic, run_experiment, Benchmark, ExperimentSpec, SyntheticSpec};
use crate::harness::{QUERIES_FILE, SCORES_FILE, TOOLS_FILE};
use crate::report::{write_combined_summary, EvalReport, REPORT_FILES};
use crate::scorer::load_scores;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerChoice {
    /// A score file when one is configured or present, BM25 otherwise.
    #[default]
    Auto,
    Bm25,
    File,
}

/// Synthetic benchmark: a preset with optional field overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSource {
    #[serde(default = "default_preset")]
    pub preset: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_queries: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub found_at_1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tail: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score_noise: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drop: Option<f64>,
}

fn default_preset() -> String {
    "strong".into()
}

impl SyntheticSource {
    /// A preset with no overrides.
    pub fn new(preset: &str, seed: u64) -> Self {
        Self {
            preset: preset.into(),
            seed,
            corpus_size: None,
            num_queries: None,
            found_at_1: None,
            rank_tail: None,
            score_noise: None,
            decay: None,
            drop: None,
        }
    }

    pub fn spec(&self) -> Result<SyntheticSpec> {
        let p = SyntheticSpec::preset(&self.preset)?;
        let spec = SyntheticSpec {
            corpus_size: self.corpus_size.unwrap_or(p.corpus_size),
            num_queries: self.num_queries.unwrap_or(p.num_queries),
            found_at_1: self.found_at_1.unwrap_or(p.found_at_1),
            rank_tail: self.rank_tail.unwrap_or(p.rank_tail),
            score_noise: self.score_noise.unwrap_or(p.score_noise),
            decay: self.decay.unwrap_or(p.decay),
            drop: self.drop.unwrap_or(p.drop),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Same source with every field spelled out.
    pub fn resolved(&self) -> Result<Self> {
        let s = self.spec()?;
        Ok(Self {
            preset: self.preset.clone(),
            seed: self.seed,
            corpus_size: Some(s.corpus_size),
            num_queries: Some(s.num_queries),
            found_at_1: Some(s.found_at_1),
            rank_tail: Some(s.rank_tail),
            score_noise: Some(s.score_noise),
            decay: Some(s.decay),
            drop: Some(s.drop),
        })
    }
}

/// Where a run's tools, queries and scores come from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSource>,
    /// Directory holding `tools.jsonl`, `queries.jsonl` and optionally
    /// `scores.jsonl`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Score file overriding `dir/scores.jsonl`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<PathBuf>,
    #[serde(default)]
    pub scorer: ScorerChoice,
}

impl BenchmarkSource {
    pub fn validate(&self) -> Result<()> {
        match (&self.synthetic, &self.dir) {
            (Some(_), Some(_)) => Err(Error::config("benchmark sets both `synthetic` and `dir`")),
            (None, None) => Err(Error::config("benchmark needs `synthetic` or `dir`")),
            (Some(syn), None) => {
                if self.scores.is_some() || self.scorer == ScorerChoice::Bm25 {
                    return Err(Error::config(
                        "synthetic benchmarks carry their own scores; drop `scores` and `scorer`",
                    ));
                }
                syn.spec().map(|_| ())
            }
            (None, Some(_)) => Ok(()),
        }
    }

    pub fn load(&self) -> Result<Benchmark> {
        self.validate()?;
        if let Some(syn) = &self.synthetic {
            return generate_synthetic(&syn.spec()?, syn.seed);
        }
        let dir = self.dir.as_deref().expect("validated");
        let default_scores = dir.join(SCORES_FILE);
        let scores = match (self.scorer, &self.scores) {
            (ScorerChoice::Bm25, _) => None,
            (_, Some(path)) => Some(path.clone()),
            (ScorerChoice::Auto, None) => default_scores.exists().then_some(default_scores),
            (ScorerChoice::File, None) => Some(default_scores),
        };
        let registry = crate::harness::read_jsonl(&dir.join(TOOLS_FILE))?;
        let queries = crate::harness::read_jsonl(&dir.join(QUERIES_FILE))?;
        let scores = scores.map(|p| load_scores(&p, &registry)).transpose()?;
        Benchmark::new(registry, queries, scores)
    }

    fn resolve(&mut self, base: &Path) -> Result<()> {
        for p in [&mut self.dir, &mut self.scores].into_iter().flatten() {
            *p = absolute(base, p)?;
        }
        if let Some(syn) = &self.synthetic {
            self.synthetic = Some(syn.resolved()?);
        }
        Ok(())
    }
}

fn absolute(base: &Path, p: &Path) -> Result<PathBuf> {
    std::path::absolute(base.join(p)).map_err(|e| Error::io(p, e))
}

/// One fully specified run: data plus experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub benchmark: BenchmarkSource,
    #[serde(default)]
    pub experiment: ExperimentSpec,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.benchmark.validate()?;
        self.experiment.validate()
    }

    pub fn run(&self) -> Result<EvalReport> {
        let benchmark = self.benchmark.load()?;
        run_experiment(&benchmark, &self.experiment)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub name: String,
    pub config: RunConfig,
}

/// A list of named runs sharing one base config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub name: String,
    pub cells: Vec<Cell>,
}

/// A `path.to.key=value` override; the value is read as TOML and falls
/// back to a bare string.
#[derive(Clone, Debug, PartialEq)]
pub struct Override {
    pub path: String,
    pub value: toml::Value,
}

impl std::str::FromStr for Override {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (path, raw) = s
            .split_once('=')
            .ok_or_else(|| Error::config(format!("override {s:?} is not of the form key=value")))?;
        let path = path.trim();
        if path.is_empty() || path.split('.').any(str::is_empty) {
            return Err(Error::config(format!("override {s:?} has an empty key")));
        }
        let raw = raw.trim();
        let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        Ok(Self {
            path: path.to_string(),
            value,
        })
    }
}

fn set_path(table: &mut toml::Table, path: &str, value: toml::Value) -> Result<()> {
    let mut keys: Vec<&str> = path.split('.').collect();
    let last = keys.pop().expect("split yields one key");
    let mut cur = table;
    for k in keys {
        let entry = cur
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::config(format!("cannot set {path:?}: {k:?} is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

/// `value` with `overrides` applied, going through its TOML form.
pub fn apply_overrides<T: Serialize + DeserializeOwned + Clone>(value: &T, overrides: &[Override]) -> Result<T> {
    if overrides.is_empty() {
        return Ok(value.clone());
    }
    let mut table = toml::Table::try_from(value).map_err(|e| Error::config(e.to_string()))?;
    for o in overrides {
        set_path(&mut table, &o.path, o.value.clone())?;
    }
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Error::config(e.to_string()))
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Directory-safe version of a cell name.
fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.=".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn short_value(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Sweep {
    /// Reads a TOML config or a previously written manifest.
    pub fn load(path: &Path, overrides: &[Override]) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if path.extension().is_some_and(|e| e == "json") {
            let manifest: Manifest = serde_json::from_str(&text)
                .map_err(|e| Error::config(format!("{}: not a run manifest: {e}", path.display())))?;
            return manifest.sweep()?.with_overrides(overrides);
        }
        Self::parse(&text, base, overrides)
    }

    pub fn parse(text: &str, base_dir: &Path, overrides: &[Override]) -> Result<Self> {
        let mut doc: toml::Table = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        let name = match doc.remove("name") {
            None => "run".to_string(),
            Some(toml::Value::String(s)) => s,
            Some(other) => return Err(Error::config(format!("`name` must be a string, got {other}"))),
        };
        let implicit = !doc.contains_key("cell");
        let cells = match doc.remove("cell") {
            None => vec![toml::Table::new()],
            Some(toml::Value::Array(items)) => items
                .into_iter()
                .map(|v| match v {
                    toml::Value::Table(t) => Ok(t),
                    other => Err(Error::config(format!("[[cell]] entries must be tables, got {other}"))),
                })
                .collect::<Result<Vec<_>>>()?,
            Some(other) => return Err(Error::config(format!("`cell` must be an array of tables, got {other}"))),
        };
        let grid: Vec<(String, Vec<toml::Value>)> = match doc.remove("grid") {
            None => Vec::new(),
            Some(toml::Value::Table(t)) => t
                .into_iter()
                .map(|(k, v)| match v {
                    toml::Value::Array(vs) if !vs.is_empty() => Ok((k, vs)),
                    _ => Err(Error::config(format!("grid key {k:?} needs a nonempty array"))),
                })
                .collect::<Result<_>>()?,
            Some(_) => return Err(Error::config("`grid` must be a table")),
        };

        let mut out = Vec::new();
        for (i, mut cell) in cells.into_iter().enumerate() {
            let cell_name = match cell.remove("name") {
                Some(toml::Value::String(s)) => s,
                Some(other) => return Err(Error::config(format!("cell name must be a string, got {other}"))),
                None if implicit => name.clone(),
                None => format!("cell{i}"),
            };
            let mut merged = doc.clone();
            merge(&mut merged, cell);
            // Cartesian product, last grid key varying fastest.
            let mut combos: Vec<(String, toml::Table)> = vec![(cell_name, merged)];
            for (key, values) in &grid {
                let leaf = key.rsplit('.').next().unwrap_or(key);
                combos = combos
                    .into_iter()
                    .flat_map(|(n, t)| {
                        values.iter().map(move |v| {
                            let mut t = t.clone();
                            let r = set_path(&mut t, key, v.clone());
                            (format!("{n}_{leaf}={}", short_value(v)), t, r)
                        })
                    })
                    .map(|(n, t, r)| r.map(|_| (n, t)))
                    .collect::<Result<_>>()?;
            }
            for (cell_name, mut table) in combos {
                for o in overrides {
                    set_path(&mut table, &o.path, o.value.clone())?;
                }
                let mut config: RunConfig = toml::Value::Table(table)
                    .try_into()
                    .map_err(|e: toml::de::Error| Error::config(format!("cell {cell_name:?}: {e}")))?;
                config.experiment.name = cell_name.clone();
                config.benchmark.resolve(base_dir)?;
                out.push(Cell {
                    name: sanitize(&cell_name),
                    config,
                });
            }
        }
        let sweep = Sweep { name, cells: out };
        sweep.validate()?;
        Ok(sweep)
    }

    fn with_overrides(mut self, overrides: &[Override]) -> Result<Self> {
        for cell in &mut self.cells {
            cell.config = apply_overrides(&cell.config, overrides)
                .map_err(|e| Error::config(format!("cell {:?}: {}", cell.name, strip_kind(&e))))?;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() {
            return Err(Error::config("config describes no runs"));
        }
        let mut names = std::collections::BTreeSet::new();
        for c in &self.cells {
            if !names.insert(c.name.as_str()) {
                return Err(Error::config(format!("duplicate cell name {:?}", c.name)));
            }
            c.config
                .validate()
                .map_err(|e| Error::config(format!("cell {:?}: {}", c.name, strip_kind(&e))))?;
        }
        Ok(())
    }

    /// The only cell, for commands that take a single run.
    pub fn single(&self) -> Result<&Cell> {
        match self.cells.as_slice() {
            [cell] => Ok(cell),
            cells => Err(Error::config(format!(
                "expected a single run, config describes {} cells",
                cells.len()
            ))),
        }
    }
}

fn strip_kind(e: &Error) -> String {
    match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

/// Written next to every output; replaying it regenerates the outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub program: String,
    pub version: String,
    pub command: String,
    pub formats: BTreeMap<String, u32>,
    /// Every seed that shaped the outputs, e.g. `strong/training`.
    pub seeds: BTreeMap<String, Vec<u64>>,
    /// Input locations outside the config, such as a policy directory.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, PathBuf>,
    pub config: serde_json::Value,
}

impl Manifest {
    pub fn new(command: &str, config: serde_json::Value, seeds: BTreeMap<String, Vec<u64>>) -> Self {
        Self {
            program: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            formats: BTreeMap::from([
                ("policy".into(), crate::agents::serialize::FORMAT_VERSION),
                ("manifest".into(), 1),
            ]),
            seeds,
            inputs: BTreeMap::new(),
            config,
        }
    }

    pub fn for_sweep(command: &str, sweep: &Sweep) -> Self {
        let mut seeds = BTreeMap::new();
        for c in &sweep.cells {
            let e = &c.config.experiment;
            seeds.insert(format!("{}/training", c.name), e.seeds.clone());
            seeds.insert(format!("{}/split", c.name), vec![e.split_seed]);
            seeds.insert(format!("{}/candidates", c.name), vec![e.candidate_seed]);
            if let Some(syn) = &c.config.benchmark.synthetic {
                seeds.insert(format!("{}/data", c.name), vec![syn.seed]);
            }
        }
        let config = serde_json::to_value(sweep).expect("sweep serializes");
        Self::new(command, config, seeds)
    }

    pub fn sweep(&self) -> Result<Sweep> {
        let sweep: Sweep = serde_json::from_value(self.config.clone())
            .map_err(|e| Error::config(format!("manifest of `{}` holds no run config: {e}", self.command)))?;
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::data(path.display().to_string(), e.to_string()))
    }
}

/// Writes the CSV tables and the text summary of one report.
pub fn write_report(report: &EvalReport, dir: &Path) -> Result<()> {
    report.emit_csv(dir)?;
    report.write_text(dir)
}

pub struct CellOutcome {
    pub name: String,
    pub result: Result<EvalReport>,
}

/// Runs every cell into `out/<cell>/` on a pool of `jobs` workers (0 picks
/// one per core), then writes the combined `summary.csv` and `summary.txt`
/// and the manifest into `out`.
///
/// A failing cell leaves an `error.txt` in its directory and does not stop
/// the others.
pub fn run_sweep(sweep: &Sweep, out: &Path, jobs: usize) -> Result<Vec<CellOutcome>> {
    sweep.validate()?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    Manifest::for_sweep("sweep", sweep).write(out)?;

    let run_cell = |cell: &Cell| {
        let dir = out.join(&cell.name);
        let result = cell.config.run().and_then(|r| {
            write_report(&r, &dir)?;
            Ok(r)
        });
        let _ = record_cell_status(&dir, result.as_ref().err());
        CellOutcome {
            name: cell.name.clone(),
            result,
        }
    };
    let outcomes = in_pool(jobs, || crate::par_map(&sweep.cells, run_cell))?;

    let ok: Vec<&EvalReport> = outcomes.iter().filter_map(|o| o.result.as_ref().ok()).collect();
    write_combined_summary(&out.join("summary.csv"), &ok)?;
    let mut text = String::new();
    for r in &ok {
        text.push_str(&r.to_string());
        text.push('\n');
    }
    for o in &outcomes {
        if let Err(e) = &o.result {
            text.push_str(&format!("cell {} failed: {e}\n", o.name));
        }
    }
    let path = out.join("summary.txt");
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(outcomes)
}

/// Leaves `error.txt` for a failed cell and clears stale outputs, or
/// removes an old `error.txt` after success.
fn record_cell_status(dir: &Path, err: Option<&Error>) -> Result<()> {
    let error_file = dir.join("error.txt");
    match err {
        None => {
            if error_file.exists() {
                fs::remove_file(&error_file).map_err(|e| Error::io(&error_file, e))?;
            }
        }
        Some(e) => {
            fs::create_dir_all(dir).map_err(|io| Error::io(dir, io))?;
            for f in REPORT_FILES {
                let _ = fs::remove_file(dir.join(f));
            }
            fs::write(&error_file, format!("{e}\n")).map_err(|io| Error::io(&error_file, io))?;
        }
    }
    Ok(())
}

/// Runs `f` with at most `jobs` worker threads.
#[cfg(feature = "parallel")]
pub fn in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::config(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(not(feature = "parallel"))]
pub fn in_pool<T: Send>(_jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    Ok(f())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::RewardKind;

    const BASE: &str = r#"
name = "demo"

[benchmark]
synthetic = { preset = "smoke", seed = 3 }

[experiment]
seeds = [0, 1]
"#;

    #[test]
    fn single_run_defaults() {
        let s = Sweep::parse(BASE, Path::new("/tmp"), &[]).unwrap();
        let cell = s.single().unwrap();
        assert_eq!(cell.name, "demo");
        assert_eq!(cell.config.experiment.name, "demo");
        assert_eq!(cell.config.experiment.seeds, [0, 1]);
        let syn = cell.config.benchmark.synthetic.as_ref().unwrap();
        assert_eq!(syn.corpus_size, Some(10));
        assert_eq!(cell.config.experiment.methods.len(), 4);
    }

    #[test]
    fn cells_and_grid_expand() {
        let text = format!(
            "{BASE}\n[[cell]]\nname = \"a\"\n\n[[cell]]\nname = \"b\"\nbenchmark.synthetic.found_at_1 = 0.2\n\n[grid]\n\"experiment.episode.reward_kind\" = [\"bor\", \"f1\"]\n"
        );
        let s = Sweep::parse(&text, Path::new("/tmp"), &[]).unwrap();
        let names: Vec<&str> = s.cells.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "a_reward_kind=bor",
                "a_reward_kind=f1",
                "b_reward_kind=bor",
                "b_reward_kind=f1"
            ]
        );
        assert_eq!(s.cells[1].config.experiment.episode.reward_kind, RewardKind::F1);
        let syn = |i: usize| s.cells[i].config.benchmark.synthetic.clone().unwrap();
        assert_eq!(syn(0).found_at_1, Some(0.7));
        assert_eq!(syn(3).found_at_1, Some(0.2));
    }

    #[test]
    fn overrides_win_and_parse_values() {
        let o: Vec<Override> = [
            "experiment.seeds=[5]",
            "experiment.episode.gamma=1.0",
            "experiment.buckets=narrow",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
        let s = Sweep::parse(BASE, Path::new("/tmp"), &o).unwrap();
        let e = &s.single().unwrap().config.experiment;
        assert_eq!(e.seeds, [5]);
        assert_eq!(e.episode.gamma, 1.0);
        assert_eq!(e.buckets, crate::harness::BucketScheme::Narrow);
        assert!("novalue".parse::<Override>().is_err());
    }

    #[test]
    fn config_errors() {
        let bad = [
            "[benchmark]\n",
            "[benchmark]\nsynthetic = { preset = \"nope\" }\n",
            "[benchmark]\nsynthetic = {}\n[experiment]\nseeds = []\n",
            "[benchmark]\nsynthetic = {}\n[experiment]\ntypo = 1\n",
            "[benchmark]\nsynthetic = {}\n[experiment.episode]\ngamma = 1.5\n",
            "[benchmark]\nsynthetic = {}\n[[cell]]\nname = \"x\"\n[[cell]]\nname = \"x\"\n",
            "[benchmark]\nsynthetic = {}\ndir = \"d\"\n",
            "not toml at all [",
        ];
        for text in bad {
            let r = Sweep::parse(text, Path::new("/tmp"), &[]);
            assert!(matches!(r, Err(Error::Config(_))), "{text:?} gave {r:?}");
        }
    }

    #[test]
    fn manifest_round_trip() {
        let s = Sweep::parse(BASE, Path::new("/tmp"), &[]).unwrap();
        let m = Manifest::for_sweep("eval", &s);
        let dir = tempfile::tempdir().unwrap();
        m.write(dir.path()).unwrap();
        let path = dir.path().join(MANIFEST_FILE);
        assert_eq!(Manifest::load(&path).unwrap(), m);
        assert_eq!(Sweep::load(&path, &[]).unwrap(), s);
        assert_eq!(m.seeds["demo/data"], [3]);
    }

    #[test]
    fn methods_from_toml() {
        let text = format!(
            "{BASE}\n[[experiment.methods]]\nname = \"fk3\"\nlearner = {{ kind = \"fixed\", k = 3 }}\n\n[[experiment.methods]]\nname = \"q\"\nreward_kind = \"f1\"\nlearner = {{ kind = \"tabular\", epochs = 4 }}\n"
        );
        let s = Sweep::parse(&text, Path::new("/tmp"), &[]).unwrap();
        let m = &s.single().unwrap().config.experiment.methods;
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].learner, crate::agents::Learner::Fixed { k: 3 });
        match &m[1].learner {
            crate::agents::Learner::Tabular(hp) => assert_eq!(hp.epochs, 4),
            other => panic!("{other:?}"),
        }
        let typo = text.replace("epochs = 4", "epoch = 4");
        assert!(Sweep::parse(&typo, Path::new("/tmp"), &[]).is_err());
    }

    #[test]
    fn relative_paths_become_absolute() {
        let text = "[benchmark]\ndir = \"bench\"\nscores = \"../s.jsonl\"\n";
        let s = Sweep::parse(text, Path::new("/data/cfg"), &[]).unwrap();
        let b = &s.single().unwrap().config.benchmark;
        assert_eq!(b.dir.as_deref(), Some(Path::new("/data/cfg/bench")));
        assert_eq!(b.scores.as_deref(), Some(Path::new("/data/cfg/../s.jsonl")));
    }
}
