use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{Discretizer, ScoreScale, StateKey, FEATURE_COUNT};
use super::{shuffled, EpochStats, ExplorationSchedule, TrainingLog};
use crate::env::{Action, DepthEnv, Episode, EpisodeConfig, State};
use crate::error::{Error, Result};

/// Depth prefix of each training list sampled when fitting bin edges.
const EDGE_FIT_DEPTH: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TabularHyperparams {
    /// Passes over the training queries.
    pub epochs: usize,
    pub learning_rate: f64,
    /// Step size for the n-th update of an action value is
    /// `learning_rate / n^visit_decay`; zero keeps it constant.
    pub visit_decay: f64,
    pub bins: usize,
    /// Constant part of the initial value of unseen action values.
    pub initial_value: f64,
    /// Unseen action values also start at this fraction of the success
    /// reward for stopping at the state's depth. Positive values drive
    /// exploration of deep states in proportion to what they could pay.
    pub optimism: f64,
    pub exploration: ExplorationSchedule,
}

impl Default for TabularHyperparams {
    fn default() -> Self {
        Self {
            epochs: 30,
            learning_rate: 1.0,
            visit_decay: 0.6,
            bins: 5,
            initial_value: 0.0,
            optimism: 0.2,
            exploration: ExplorationSchedule::default(),
        }
    }
}

/// Q-table over discretized states: `[q_stop, q_continue]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TabularPolicy {
    pub scale: ScoreScale,
    pub discretizer: Discretizer,
    pub table: BTreeMap<StateKey, [f64; 2]>,
}

impl TabularPolicy {
    pub fn key(&self, state: &State) -> StateKey {
        self.discretizer.key(&self.scale.features(state), state.depth)
    }

    pub fn values(&self, state: &State) -> Option<[f64; 2]> {
        self.table.get(&self.key(state)).copied()
    }

    /// Greedy action; ties and unvisited states stop.
    pub fn act(&self, state: &State) -> Action {
        if state.depth >= state.registry_size {
            return Action::Stop;
        }
        match self.values(state) {
            Some([stop, cont]) if cont > stop => Action::Continue,
            _ => Action::Stop,
        }
    }
}

fn greedy(q: &[f64; 2]) -> Action {
    if q[1] > q[0] {
        Action::Continue
    } else {
        Action::Stop
    }
}

fn slot(a: Action) -> usize {
    match a {
        Action::Stop => 0,
        Action::Continue => 1,
    }
}

/// Fits bin edges on the score features of each list's leading states.
pub fn fit_discretizer(
    episodes: &[Episode],
    scale: &ScoreScale,
    bins: usize,
    cfg: &EpisodeConfig,
) -> Result<Discretizer> {
    let mut samples: Vec<[f64; FEATURE_COUNT]> = Vec::new();
    for ep in episodes {
        let (mut env, mut state) = DepthEnv::reset(&ep.ranked, &ep.gold, *cfg)?;
        loop {
            samples.push(scale.features(&state));
            if state.depth >= EDGE_FIT_DEPTH.min(ep.ranked.len()) {
                break;
            }
            match env.step(Action::Continue)?.next_state {
                Some(s) => state = s,
                None => break,
            }
        }
    }
    Ok(Discretizer::fit(&samples, bins))
}

pub fn train_tabular(
    episodes: &[Episode],
    cfg: &EpisodeConfig,
    hp: &TabularHyperparams,
    seed: u64,
) -> Result<(TabularPolicy, TrainingLog)> {
    if episodes.is_empty() {
        return Err(Error::config("no training episodes"));
    }
    if hp.bins < 1 || !(hp.learning_rate > 0.0 && hp.learning_rate <= 1.0) || !(hp.visit_decay >= 0.0) {
        return Err(Error::config(format!(
            "invalid tabular hyperparameters: bins={}, learning_rate={}, visit_decay={}",
            hp.bins, hp.learning_rate, hp.visit_decay
        )));
    }
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = ScoreScale::fit(episodes.iter().map(|e| &e.ranked));
    let discretizer = fit_discretizer(episodes, &scale, hp.bins, cfg)?;
    let mut policy = TabularPolicy {
        scale,
        discretizer,
        table: BTreeMap::new(),
    };
    let init = |state: &State, relevant: usize| {
        let bonus = if hp.optimism == 0.0 {
            0.0
        } else {
            hp.optimism * cfg.terminal_reward(true, state.depth, state.registry_size, relevant)
        };
        [hp.initial_value + bonus; 2]
    };
    let mut visits: BTreeMap<StateKey, [u32; 2]> = BTreeMap::new();
    let total = hp.epochs * episodes.len();
    let mut log = TrainingLog::default();
    let mut counter = 0usize;

    for epoch in 0..hp.epochs {
        let mut stats = EpochStats::new(epoch);
        for idx in shuffled(episodes.len(), &mut rng) {
            let ep = &episodes[idx];
            let epsilon = hp.exploration.epsilon(counter, total);
            counter += 1;
            let (mut env, state) = DepthEnv::reset(&ep.ranked, &ep.gold, *cfg)?;
            let relevant = env.relevant();
            let mut key = policy.key(&state);
            policy.table.entry(key).or_insert_with(|| init(&state, relevant));
            let mut rewards = Vec::new();
            loop {
                let q = policy.table[&key];
                let action = if rng.random::<f64>() < epsilon {
                    if rng.random::<bool>() {
                        Action::Continue
                    } else {
                        Action::Stop
                    }
                } else {
                    greedy(&q)
                };
                let out = env.step(action)?;
                rewards.push(out.reward);
                let (target, next) = match out.next_state {
                    Some(next_state) => {
                        let next_key = policy.key(&next_state);
                        let nq = *policy
                            .table
                            .entry(next_key)
                            .or_insert_with(|| init(&next_state, relevant));
                        (out.reward + cfg.gamma * nq[0].max(nq[1]), Some(next_key))
                    }
                    None => (out.reward, None),
                };
                let a = slot(action);
                let n = &mut visits.entry(key).or_default()[a];
                *n += 1;
                let alpha = if hp.visit_decay == 0.0 {
                    hp.learning_rate
                } else {
                    hp.learning_rate / (*n as f64).powf(hp.visit_decay)
                };
                let entry = policy.table.get_mut(&key).expect("inserted above");
                entry[a] += alpha * (target - entry[a]);
                match next {
                    Some(k) => key = k,
                    None => break,
                }
            }
            stats.record(&rewards, cfg.gamma, env.depth(), env.found());
        }
        log.epochs.push(stats.finish());
    }
    Ok((policy, log))
}
