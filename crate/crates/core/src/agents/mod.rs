//! Depth policies and their training loops.

pub mod features;
pub mod neural;
pub mod serialize;
pub mod tabular;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::{episode_return, Action, DepthEnv, Episode, EpisodeConfig, EpisodeTrace, State};
use crate::error::{Error, Result};

pub use neural::{train_neural, NeuralHyperparams, NeuralPolicy};
pub use tabular::{train_tabular, TabularHyperparams, TabularPolicy};

/// Linear epsilon decay from `start` to `end` over the first
/// `decay_fraction` of training episodes, constant afterwards.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplorationSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_fraction: f64,
}

impl Default for ExplorationSchedule {
    fn default() -> Self {
        Self {
            start: 1.0,
            end: 0.05,
            decay_fraction: 0.8,
        }
    }
}

impl ExplorationSchedule {
    pub fn epsilon(&self, episode: usize, total: usize) -> f64 {
        let horizon = self.decay_fraction * total as f64;
        if horizon <= 0.0 {
            return self.end;
        }
        let t = episode as f64 / horizon;
        if t >= 1.0 {
            return self.end;
        }
        self.start + (self.end - self.start) * t
    }
}

/// A fresh permutation of `0..n`.
pub fn shuffled<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochSummary {
    pub epoch: usize,
    pub mean_return: f64,
    pub mean_depth: f64,
    pub found_rate: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingLog {
    pub epochs: Vec<EpochSummary>,
}

pub(crate) struct EpochStats {
    epoch: usize,
    episodes: usize,
    return_sum: f64,
    depth_sum: usize,
    found: usize,
}

impl EpochStats {
    pub(crate) fn new(epoch: usize) -> Self {
        Self {
            epoch,
            episodes: 0,
            return_sum: 0.0,
            depth_sum: 0,
            found: 0,
        }
    }

    pub(crate) fn record(&mut self, rewards: &[f64], gamma: f64, depth: usize, found: bool) {
        self.episodes += 1;
        self.return_sum += episode_return(rewards, gamma);
        self.depth_sum += depth;
        self.found += usize::from(found);
    }

    pub(crate) fn finish(self) -> EpochSummary {
        let n = self.episodes.max(1) as f64;
        EpochSummary {
            epoch: self.epoch,
            mean_return: self.return_sum / n,
            mean_depth: self.depth_sum as f64 / n,
            found_rate: self.found as f64 / n,
        }
    }
}

/// Presents the top `k` candidates for every query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedKPolicy {
    pub k: usize,
}

impl FixedKPolicy {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::config("fixed-K depth must be at least 1"));
        }
        Ok(Self { k })
    }

    pub fn act(&self, state: &State) -> Action {
        if state.depth < self.k && state.depth < state.registry_size {
            Action::Continue
        } else {
            Action::Stop
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Policy {
    Fixed(FixedKPolicy),
    Tabular(TabularPolicy),
    Neural(NeuralPolicy),
}

impl Policy {
    pub fn act(&self, state: &State) -> Action {
        match self {
            Policy::Fixed(p) => p.act(state),
            Policy::Tabular(p) => p.act(state),
            Policy::Neural(p) => p.act(state),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Policy::Fixed(_) => "fixed",
            Policy::Tabular(_) => "tabular",
            Policy::Neural(_) => "neural",
        }
    }
}

/// What to train.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Learner {
    Fixed { k: usize },
    Tabular(TabularHyperparams),
    Neural(NeuralHyperparams),
}

impl Learner {
    pub fn name(&self) -> String {
        match self {
            Learner::Fixed { k } => format!("fixed_k{k}"),
            Learner::Tabular(_) => "tabular".into(),
            Learner::Neural(_) => "neural".into(),
        }
    }
}

/// Trains `learner` on `episodes`. Fixed-K needs no data and returns an
/// empty log.
pub fn train(learner: &Learner, episodes: &[Episode], cfg: &EpisodeConfig, seed: u64) -> Result<(Policy, TrainingLog)> {
    match learner {
        Learner::Fixed { k } => Ok((Policy::Fixed(FixedKPolicy::new(*k)?), TrainingLog::default())),
        Learner::Tabular(hp) => train_tabular(episodes, cfg, hp, seed).map(|(p, log)| (Policy::Tabular(p), log)),
        Learner::Neural(hp) => train_neural(episodes, cfg, hp, seed).map(|(p, log)| (Policy::Neural(p), log)),
    }
}

/// Runs one greedy episode.
pub fn rollout(policy: &Policy, episode: &Episode, cfg: &EpisodeConfig) -> Result<EpisodeTrace> {
    let (mut env, mut state) = DepthEnv::reset(&episode.ranked, &episode.gold, *cfg)?;
    let mut rewards = Vec::new();
    let terminal = loop {
        let out = env.step(policy.act(&state))?;
        rewards.push(out.reward);
        match out.next_state {
            Some(s) => state = s,
            None => break out.reward,
        }
    };
    Ok(EpisodeTrace {
        query_id: episode.query_id.clone(),
        depth: env.depth(),
        found: env.found(),
        terminal_reward: terminal,
        episode_return: episode_return(&rewards, cfg.gamma),
        gold_rank: env.gold_rank(),
        relevant: env.relevant(),
        candidate_count: episode.ranked.len(),
    })
}
