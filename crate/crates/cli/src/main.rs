//! `bor-depth`: synthetic benchmarks, BM25 scoring, depth-policy training,
//! evaluation and sweeps.
//!
//! Every command writes `manifest.json` next to its outputs and
//! `bor-depth replay <manifest>` regenerates them. Exit status is 0 on
//! success, 1 for configuration errors, 2 for data or I/O errors and 3 for
//! numeric failures during training.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use bor_depth::config::Override;
use bor_depth::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bor-depth",
    version,
    about = "Learned shortlist depth scored in bits over random"
)]
struct Cli {
    /// Root directory for all outputs.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic benchmark with controlled gold ranks.
    Synth(SynthArgs),
    /// Score every query against every tool with BM25.
    Score(ScoreArgs),
    /// Train every method and seed of a config and save the policies.
    Train(RunArgs),
    /// Evaluate a config, training in place or loading saved policies.
    Eval(EvalArgs),
    /// Run every cell of a config and write a combined summary.
    Sweep(RunArgs),
    /// Regenerate an output directory from its manifest.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// One of smoke, strong, weak, mixed.
    #[arg(long, default_value = "strong")]
    preset: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Preset field override, e.g. `--set num_queries=500`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<Override>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Directory with tools.jsonl and queries.jsonl.
    #[arg(long)]
    bench: PathBuf,
    #[arg(long, default_value_t = 1.2)]
    k1: f64,
    #[arg(long, default_value_t = 0.75)]
    b: f64,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config, or a manifest.json from an earlier run.
    #[arg(long)]
    config: PathBuf,
    /// Config override, e.g. `--set experiment.seeds=[0,1]`. Applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<Override>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Output root of an earlier `train`; its policies are evaluated
    /// instead of training new ones.
    #[arg(long)]
    policies: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    manifest: PathBuf,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Usage(_) => 1,
        Error::Data { .. } | Error::Io { .. } => 2,
        Error::Training(_) => 3,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let out = cli.out;
    match cli.command {
        Command::Synth(a) => commands::synth(&out, &a.preset, a.seed, &a.sets),
        Command::Score(a) => commands::score(&out, &a.bench, a.k1, a.b),
        Command::Train(a) => commands::train(&out, &commands::load(&a.config, &a.sets)?, a.jobs),
        Command::Eval(a) => {
            let sweep = commands::load(&a.run.config, &a.run.sets)?;
            commands::eval(&out, &sweep, a.policies.as_deref(), a.run.jobs)
        }
        Command::Sweep(a) => commands::sweep(&out, &commands::load(&a.config, &a.sets)?, a.jobs),
        Command::Replay(a) => commands::replay(&out, &a.manifest, a.jobs),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
