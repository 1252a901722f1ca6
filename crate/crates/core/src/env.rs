//! Depth selection as an episodic MDP.
//!
//! One query is one episode. The agent walks a ranked candidate list and
//! at each depth either presents what it has examined (`Stop`) or looks at
//! the next candidate (`Continue`). The episode starts with the rank-1
//! candidate already examined.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{self, Bits, SelectionContext};
use crate::scorer::RankedList;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardKind {
    /// `-log2 p_rand(N, R, k)` on success.
    Bor,
    /// `2 / (k + 1)` on success.
    F1,
    /// `1.0` on success regardless of depth.
    ConstantOne,
}

impl RewardKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RewardKind::Bor => "bor",
            RewardKind::F1 => "f1",
            RewardKind::ConstantOne => "constant_one",
        }
    }
}

impl std::str::FromStr for RewardKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bor" => Ok(RewardKind::Bor),
            "f1" => Ok(RewardKind::F1),
            "constant_one" | "constant" => Ok(RewardKind::ConstantOne),
            other => Err(Error::config(format!("unknown reward kind {other:?}"))),
        }
    }
}

/// Which relevant count feeds the BoR reward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelevantCount {
    /// The true number of gold tools for the query.
    Oracle,
    /// Pretend every query has exactly one relevant tool.
    AssumeOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpisodeConfig {
    pub reward_kind: RewardKind,
    /// Charged on every `Continue`.
    pub step_cost: f64,
    pub gamma: f64,
    pub relevant_count: RelevantCount,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            reward_kind: RewardKind::Bor,
            step_cost: 0.01,
            gamma: 0.95,
            relevant_count: RelevantCount::Oracle,
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_cost >= 0.0 && self.step_cost.is_finite()) {
            return Err(Error::config(format!(
                "step_cost must be a nonnegative number, got {}",
                self.step_cost
            )));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::config(format!("gamma must lie in (0, 1], got {}", self.gamma)));
        }
        Ok(())
    }

    /// Terminal reward for stopping at `depth` out of `corpus_size`.
    pub fn terminal_reward(&self, found: bool, depth: usize, corpus_size: usize, relevant: usize) -> f64 {
        if !found {
            return 0.0;
        }
        match self.reward_kind {
            RewardKind::Bor => {
                let relevant = match self.relevant_count {
                    RelevantCount::Oracle => relevant.clamp(1, corpus_size),
                    RelevantCount::AssumeOne => 1,
                };
                let ctx = SelectionContext::new(corpus_size as u64, relevant as u64, depth as u64)
                    .expect("depth and relevant count are clamped to the corpus");
                metric::bor_max(ctx).value()
            }
            RewardKind::F1 => 2.0 / (depth as f64 + 1.0),
            RewardKind::ConstantOne => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Stop,
    Continue,
}

/// What the agent observes at depth `k`. Scores are raw scorer outputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub top_score: f64,
    /// `top_score - score at rank k`.
    pub gap_first_to_current: f64,
    /// `top_score - min score among ranks 1..=k`.
    pub spread: f64,
    pub depth: usize,
    pub registry_size: usize,
    /// `log2(N / k)`.
    pub ceiling: Bits,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    /// `None` once the episode is over.
    pub next_state: Option<State>,
    pub reward: f64,
    pub done: bool,
}

/// An active episode over one ranked list.
#[derive(Debug, Clone)]
pub struct DepthEnv<'a> {
    ranked: &'a RankedList,
    cfg: EpisodeConfig,
    gold_rank: Option<usize>,
    relevant: usize,
    depth: usize,
    min_score: f64,
    done: bool,
}

impl<'a> DepthEnv<'a> {
    /// Starts an episode with the rank-1 candidate already examined.
    ///
    /// Gold ids absent from the list are allowed; they can never be found.
    pub fn reset<S: AsRef<str>>(ranked: &'a RankedList, gold: &[S], cfg: EpisodeConfig) -> Result<(Self, State)> {
        if ranked.is_empty() {
            return Err(Error::domain("ranked list is empty"));
        }
        if gold.is_empty() {
            return Err(Error::domain("query has no gold tools"));
        }
        cfg.validate()?;
        let env = DepthEnv {
            ranked,
            cfg,
            gold_rank: ranked.best_rank(gold),
            relevant: gold.len(),
            depth: 1,
            min_score: ranked.score_at(1),
            done: false,
        };
        let state = env.state();
        Ok((env, state))
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.cfg
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn gold_rank(&self) -> Option<usize> {
        self.gold_rank
    }

    pub fn relevant(&self) -> usize {
        self.relevant
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn found(&self) -> bool {
        self.gold_rank.is_some_and(|r| r <= self.depth)
    }

    fn state(&self) -> State {
        let n = self.ranked.len();
        let top = self.ranked.score_at(1);
        State {
            top_score: top,
            gap_first_to_current: top - self.ranked.score_at(self.depth),
            spread: top - self.min_score,
            depth: self.depth,
            registry_size: n,
            ceiling: metric::bor_opt(n as u64, self.depth as u64).expect("depth stays within the ranked list"),
        }
    }

    pub fn step(&mut self, action: Action) -> Result<StepOutcome> {
        if self.done {
            return Err(Error::Usage("step called on a finished episode".into()));
        }
        let n = self.ranked.len();
        // Continuing past the last candidate is a forced stop.
        if action == Action::Stop || self.depth == n {
            self.done = true;
            let reward = self.cfg.terminal_reward(self.found(), self.depth, n, self.relevant);
            return Ok(StepOutcome {
                next_state: None,
                reward,
                done: true,
            });
        }
        self.depth += 1;
        self.min_score = self.min_score.min(self.ranked.score_at(self.depth));
        Ok(StepOutcome {
            next_state: Some(self.state()),
            reward: -self.cfg.step_cost,
            done: false,
        })
    }
}

/// `sum_t gamma^t * reward_t`.
pub fn episode_return(rewards: &[f64], gamma: f64) -> f64 {
    let mut discount = 1.0;
    let mut total = 0.0;
    for r in rewards {
        total += discount * r;
        discount *= gamma;
    }
    total
}

/// A ranked candidate list paired with its gold tools: one episode's input.
#[derive(Clone, Debug, PartialEq)]
pub struct Episode {
    pub query_id: String,
    pub ranked: RankedList,
    pub gold: Vec<String>,
}

/// Result of one evaluated episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub query_id: String,
    /// Number of candidates presented.
    pub depth: usize,
    pub found: bool,
    pub terminal_reward: f64,
    pub episode_return: f64,
    /// Best 1-based gold rank in the list, used for difficulty buckets.
    pub gold_rank: Option<usize>,
    pub relevant: usize,
    pub candidate_count: usize,
}
