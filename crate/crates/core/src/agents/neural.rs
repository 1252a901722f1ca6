//! A small fully-connected Q-network trained with experience replay and a
//! periodically synchronized target network.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{ScoreScale, FEATURE_COUNT};
use super::{shuffled, EpochStats, ExplorationSchedule, TrainingLog};
use crate::env::{Action, DepthEnv, Episode, EpisodeConfig, State};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NeuralHyperparams {
    pub hidden: Vec<usize>,
    pub replay_capacity: usize,
    pub batch_size: usize,
    /// Gradient updates between target-network copies.
    pub target_sync: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Environment steps per gradient update.
    pub train_every: usize,
    pub exploration: ExplorationSchedule,
}

impl Default for NeuralHyperparams {
    fn default() -> Self {
        Self {
            hidden: vec![32, 32],
            replay_capacity: 10_000,
            batch_size: 64,
            target_sync: 250,
            learning_rate: 1e-3,
            epochs: 30,
            train_every: 1,
            exploration: ExplorationSchedule::default(),
        }
    }
}

/// Affine layer, weights stored row-major as `outputs x inputs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for o in 0..self.outputs {
            let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
            let z: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias[o];
            out.push(z);
        }
    }
}

/// ReLU between layers, linear output.
#[derive(Clone, Debug, PartialEq)]
pub struct QNetwork {
    pub layers: Vec<Dense>,
}

/// One (state, action, target) regression example.
#[derive(Clone, Debug)]
pub struct TdExample {
    pub features: [f64; FEATURE_COUNT],
    pub action: Action,
    pub target: f64,
}

impl QNetwork {
    /// He-uniform weights, zero biases.
    pub fn new<R: Rng>(sizes: &[usize], rng: &mut R) -> Self {
        assert!(sizes.len() >= 2, "a network needs input and output sizes");
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (inputs, outputs) = (w[0], w[1]);
                let bound = (6.0 / inputs as f64).sqrt();
                let mut layer = Dense::zeros(inputs, outputs);
                for v in &mut layer.weights {
                    *v = rng.random_range(-bound..bound);
                }
                layer
            })
            .collect();
        Self { layers }
    }

    pub fn input_size(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_size(&self) -> usize {
        self.layers.last().map_or(0, |l| l.outputs)
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut h = x.to_vec();
        let mut z = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.apply(&h, &mut z);
            if i < last {
                for v in &mut z {
                    *v = v.max(0.0);
                }
            }
            std::mem::swap(&mut h, &mut z);
        }
        h
    }

    /// Pre-activations of every layer for one input.
    fn forward_trace(&self, x: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut h = x.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = Vec::new();
            layer.apply(&h, &mut z);
            let next = if i < last {
                z.iter().map(|v| v.max(0.0)).collect()
            } else {
                z.clone()
            };
            inputs.push(std::mem::replace(&mut h, next));
            pre.push(z);
        }
        (inputs, pre)
    }

    /// Mean squared TD error `1/B sum 1/2 (Q(s,a) - y)^2` with fixed targets,
    /// and its gradient with respect to every parameter.
    pub fn td_loss_and_grad(&self, batch: &[TdExample]) -> (f64, QNetwork) {
        let mut grad = self.zeros_like();
        let scale = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        for ex in batch {
            let (inputs, pre) = self.forward_trace(&ex.features);
            let out = pre.last().expect("non-empty network");
            let a = action_index(ex.action);
            let err = out[a] - ex.target;
            loss += 0.5 * err * err * scale;

            let mut delta = vec![0.0; out.len()];
            delta[a] = err * scale;
            for l in (0..self.layers.len()).rev() {
                let layer = &self.layers[l];
                let g = &mut grad.layers[l];
                let input = &inputs[l];
                for o in 0..layer.outputs {
                    let d = delta[o];
                    if d == 0.0 {
                        continue;
                    }
                    g.bias[o] += d;
                    let row = &mut g.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (gw, x) in row.iter_mut().zip(input) {
                        *gw += d * x;
                    }
                }
                if l == 0 {
                    break;
                }
                let mut prev = vec![0.0; layer.inputs];
                for o in 0..layer.outputs {
                    let d = delta[o];
                    if d == 0.0 {
                        continue;
                    }
                    let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (p, w) in prev.iter_mut().zip(row) {
                        *p += d * w;
                    }
                }
                for (p, z) in prev.iter_mut().zip(&pre[l - 1]) {
                    if *z <= 0.0 {
                        *p = 0.0;
                    }
                }
                delta = prev;
            }
        }
        (loss, grad)
    }

    pub fn zeros_like(&self) -> QNetwork {
        QNetwork {
            layers: self.layers.iter().map(|l| Dense::zeros(l.inputs, l.outputs)).collect(),
        }
    }

    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.layers.iter().flat_map(|l| l.weights.iter().chain(l.bias.iter()))
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.bias.iter_mut()))
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }
}

fn action_index(a: Action) -> usize {
    match a {
        Action::Stop => 0,
        Action::Continue => 1,
    }
}

/// Adam state for one network.
#[derive(Clone, Debug)]
struct Adam {
    lr: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(lr: f64, params: usize) -> Self {
        Self {
            lr,
            m: vec![0.0; params],
            v: vec![0.0; params],
            t: 0,
        }
    }

    fn step(&mut self, net: &mut QNetwork, grad: &QNetwork) {
        self.t += 1;
        let c1 = 1.0 - Self::BETA1.powi(self.t);
        let c2 = 1.0 - Self::BETA2.powi(self.t);
        for (((p, g), m), v) in net
            .params_mut()
            .zip(grad.params())
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
        {
            *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * g;
            *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * g * g;
            *p -= self.lr * (*m / c1) / ((*v / c2).sqrt() + Self::EPS);
        }
    }
}

#[derive(Clone, Debug)]
struct Transition {
    features: [f64; FEATURE_COUNT],
    action: Action,
    reward: f64,
    next: Option<[f64; FEATURE_COUNT]>,
}

/// Bounded FIFO of transitions.
#[derive(Clone, Debug)]
pub struct ReplayBuffer<T> {
    capacity: usize,
    items: VecDeque<T>,
}

impl<T> ReplayBuffer<T> {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            items: VecDeque::with_capacity(capacity.min(1 << 16)),
        }
    }

    pub fn push(&mut self, item: T) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(item);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Uniform sample with replacement.
    pub fn sample<'a, R: Rng>(&'a self, n: usize, rng: &mut R) -> Vec<&'a T> {
        (0..n)
            .map(|_| &self.items[rng.random_range(0..self.items.len())])
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NeuralPolicy {
    pub scale: ScoreScale,
    pub network: QNetwork,
}

impl NeuralPolicy {
    pub fn values(&self, state: &State) -> [f64; 2] {
        let q = self.network.forward(&self.scale.features(state));
        [q[0], q[1]]
    }

    /// Greedy action; ties stop.
    pub fn act(&self, state: &State) -> Action {
        if state.depth >= state.registry_size {
            return Action::Stop;
        }
        let [stop, cont] = self.values(state);
        if cont > stop {
            Action::Continue
        } else {
            Action::Stop
        }
    }
}

pub fn train_neural(
    episodes: &[Episode],
    cfg: &EpisodeConfig,
    hp: &NeuralHyperparams,
    seed: u64,
) -> Result<(NeuralPolicy, TrainingLog)> {
    if episodes.is_empty() {
        return Err(Error::config("no training episodes"));
    }
    if hp.batch_size == 0 || hp.replay_capacity < hp.batch_size || hp.target_sync == 0 || hp.train_every == 0 {
        return Err(Error::config(format!(
            "invalid neural hyperparameters: batch_size={}, replay_capacity={}, target_sync={}, train_every={}",
            hp.batch_size, hp.replay_capacity, hp.target_sync, hp.train_every
        )));
    }
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = ScoreScale::fit(episodes.iter().map(|e| &e.ranked));
    let mut sizes = vec![FEATURE_COUNT];
    sizes.extend(&hp.hidden);
    sizes.push(2);
    let mut policy = NeuralPolicy {
        scale,
        network: QNetwork::new(&sizes, &mut rng),
    };
    let mut target = policy.network.clone();
    let mut adam = Adam::new(hp.learning_rate, policy.network.param_count());
    let mut replay: ReplayBuffer<Transition> = ReplayBuffer::new(hp.replay_capacity);

    let total = hp.epochs * episodes.len();
    let mut log = TrainingLog::default();
    let mut counter = 0usize;
    let mut steps = 0usize;
    let mut updates = 0usize;

    for epoch in 0..hp.epochs {
        let mut stats = EpochStats::new(epoch);
        for idx in shuffled(episodes.len(), &mut rng) {
            let ep = &episodes[idx];
            let epsilon = hp.exploration.epsilon(counter, total);
            counter += 1;
            let (mut env, state) = DepthEnv::reset(&ep.ranked, &ep.gold, *cfg)?;
            let mut features = scale.features(&state);
            let mut rewards = Vec::new();
            loop {
                let action = if rng.random::<f64>() < epsilon {
                    if rng.random::<bool>() {
                        Action::Continue
                    } else {
                        Action::Stop
                    }
                } else {
                    let q = policy.network.forward(&features);
                    if q[1] > q[0] {
                        Action::Continue
                    } else {
                        Action::Stop
                    }
                };
                let out = env.step(action)?;
                rewards.push(out.reward);
                let next = out.next_state.map(|s| scale.features(&s));
                replay.push(Transition {
                    features,
                    action,
                    reward: out.reward,
                    next,
                });
                steps += 1;

                if replay.len() >= hp.batch_size && steps.is_multiple_of(hp.train_every) {
                    let batch: Vec<TdExample> = replay
                        .sample(hp.batch_size, &mut rng)
                        .into_iter()
                        .map(|t| {
                            let bootstrap = t.next.map_or(0.0, |n| {
                                let q = target.forward(&n);
                                q[0].max(q[1])
                            });
                            TdExample {
                                features: t.features,
                                action: t.action,
                                target: t.reward + cfg.gamma * bootstrap,
                            }
                        })
                        .collect();
                    let (loss, grad) = policy.network.td_loss_and_grad(&batch);
                    if !loss.is_finite() || grad.params().any(|g| !g.is_finite()) {
                        return Err(Error::Training(format!(
                            "non-finite TD loss {loss} at update {updates} (epoch {epoch}, seed {seed})"
                        )));
                    }
                    adam.step(&mut policy.network, &grad);
                    updates += 1;
                    if updates.is_multiple_of(hp.target_sync) {
                        target = policy.network.clone();
                    }
                }
                match next {
                    Some(n) => features = n,
                    None => break,
                }
            }
            stats.record(&rewards, cfg.gamma, env.depth(), env.found());
        }
        log.epochs.push(stats.finish());
    }
    Ok((policy, log))
}
