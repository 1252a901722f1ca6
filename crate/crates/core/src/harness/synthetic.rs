//! Synthetic tool-selection benchmarks with a controllable scorer quality.
//!
//! For each query the gold rank `r` is drawn first: 1 with probability
//! `found_at_1`, otherwise `1 + Geometric(rank_tail)` capped at `N`. Raw
//! scores follow the base curve `-decay * ln(i)` for `i = 1..N`, with
//! `drop` added to the first `r` positions and Gaussian noise on top. The
//! sorted scores are dealt out so the gold tool sits at rank `r` and the
//! other tools fill the remaining ranks in random order.
//!
//! `drop` is what makes scores informative about difficulty: the profile
//! stays high through the gold tool and falls off after it.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Benchmark, Query};
use crate::error::{Error, Result};
use crate::scorer::{ScoreVector, Tool};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub corpus_size: usize,
    pub num_queries: usize,
    pub found_at_1: f64,
    /// Success probability of the geometric tail; smaller is heavier.
    pub rank_tail: f64,
    pub score_noise: f64,
    pub decay: f64,
    pub drop: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self::preset("strong").expect("built-in preset")
    }
}

pub const PRESETS: [&str; 4] = ["smoke", "strong", "weak", "mixed"];

impl SyntheticSpec {
    pub fn preset(name: &str) -> Result<Self> {
        let base = Self {
            corpus_size: 100,
            num_queries: 2000,
            found_at_1: 0.7,
            rank_tail: 0.3,
            score_noise: 0.3,
            decay: 0.1,
            drop: 0.5,
        };
        match name {
            "strong" => Ok(base),
            "weak" => Ok(Self {
                found_at_1: 0.33,
                rank_tail: 0.04,
                ..base
            }),
            "mixed" => Ok(Self {
                found_at_1: 0.45,
                rank_tail: 0.1,
                ..base
            }),
            "smoke" => Ok(Self {
                corpus_size: 10,
                num_queries: 60,
                rank_tail: 0.5,
                ..base
            }),
            other => Err(Error::config(format!(
                "unknown synthetic preset {other:?} (expected one of {PRESETS:?})"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if self.corpus_size < 1 || !prob(self.found_at_1) || !(self.rank_tail > 0.0 && self.rank_tail <= 1.0) {
            return Err(Error::config(format!(
                "synthetic spec needs corpus_size >= 1, found_at_1 in [0, 1] and rank_tail in (0, 1]; got {}, {}, {}",
                self.corpus_size, self.found_at_1, self.rank_tail
            )));
        }
        if !(self.decay > 0.0) || !(self.score_noise >= 0.0) || !(self.drop >= 0.0) {
            return Err(Error::config(format!(
                "synthetic spec needs decay > 0, score_noise >= 0 and drop >= 0; got {}, {}, {}",
                self.decay, self.score_noise, self.drop
            )));
        }
        Ok(())
    }

    /// Draws a gold rank.
    pub fn sample_rank<R: Rng>(&self, rng: &mut R) -> usize {
        if self.corpus_size == 1 || rng.random::<f64>() < self.found_at_1 {
            return 1;
        }
        // rand_distr counts failures before the first success, so the tail
        // offset is that count plus one.
        let failures = Geometric::new(self.rank_tail).expect("validated").sample(rng);
        failures.saturating_add(2).min(self.corpus_size as u64) as usize
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Benchmark> {
    spec.validate()?;
    let n = spec.corpus_size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let registry: Vec<Tool> = (0..n)
        .map(|i| Tool {
            id: format!("tool_{i:05}"),
            name: format!("tool_{i:05}"),
            description: format!("synthetic tool {i}"),
            parameters: vec![],
        })
        .collect();

    let mut queries = Vec::with_capacity(spec.num_queries);
    let mut scores = BTreeMap::new();
    let mut raw = vec![0.0; n];
    let mut others: Vec<usize> = Vec::with_capacity(n);
    for q in 0..spec.num_queries {
        let query_id = format!("q{q:06}");
        let gold = rng.random_range(0..n);
        let gold_rank = spec.sample_rank(&mut rng);
        for (i, v) in raw.iter_mut().enumerate() {
            let pos = i + 1;
            let lift = if pos <= gold_rank { spec.drop } else { 0.0 };
            let noise: f64 = rng.sample(StandardNormal);
            *v = -spec.decay * libm::log(pos as f64) + lift + spec.score_noise * noise;
        }
        raw.sort_by(|a, b| b.total_cmp(a));

        others.clear();
        others.extend((0..n).filter(|&i| i != gold));
        others.shuffle(&mut rng);
        let mut by_tool = vec![0.0; n];
        by_tool[gold] = raw[gold_rank - 1];
        let mut slots = (0..n).filter(|&p| p != gold_rank - 1);
        for &tool in &others {
            by_tool[tool] = raw[slots.next().expect("one slot per tool")];
        }

        scores.insert(
            query_id.clone(),
            ScoreVector {
                query_id: query_id.clone(),
                entries: registry.iter().map(|t| t.id.clone()).zip(by_tool).collect(),
            },
        );
        queries.push(Query {
            query_id,
            text: format!("synthetic query {q}"),
            gold_ids: vec![registry[gold].id.clone()],
        });
    }
    Benchmark::new(registry, queries, Some(scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scorer::rank;

    fn gold_ranks(b: &Benchmark) -> Vec<usize> {
        let scores = b.scores.as_ref().unwrap();
        b.queries
            .iter()
            .map(|q| rank(&scores[&q.query_id]).best_rank(&q.gold_ids).unwrap())
            .collect()
    }

    #[test]
    fn perfect_scorer() {
        let spec = SyntheticSpec {
            found_at_1: 1.0,
            score_noise: 0.0,
            num_queries: 200,
            ..SyntheticSpec::default()
        };
        let b = generate_synthetic(&spec, 4).unwrap();
        assert!(gold_ranks(&b).iter().all(|&r| r == 1));
    }

    #[test]
    fn no_rank_one_mass() {
        let spec = SyntheticSpec {
            found_at_1: 0.0,
            num_queries: 500,
            ..SyntheticSpec::default()
        };
        let b = generate_synthetic(&spec, 4).unwrap();
        assert!(gold_ranks(&b).iter().all(|&r| r >= 2));
    }

    #[test]
    fn gold_lands_at_sampled_rank_and_is_reproducible() {
        let spec = SyntheticSpec::preset("smoke").unwrap();
        let a = generate_synthetic(&spec, 11).unwrap();
        let b = generate_synthetic(&spec, 11).unwrap();
        assert_eq!(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // Replay the sampling sequence to recover the intended ranks.
        let mut expected = Vec::new();
        for _ in 0..spec.num_queries {
            let _gold = rng.random_range(0..spec.corpus_size);
            expected.push(spec.sample_rank(&mut rng));
            for _ in 0..spec.corpus_size {
                let _: f64 = rng.sample(StandardNormal);
            }
            let mut v: Vec<usize> = (0..spec.corpus_size - 1).collect();
            v.shuffle(&mut rng);
        }
        assert_eq!(gold_ranks(&a), expected);
    }

    #[test]
    fn rank_one_fraction_concentrates() {
        let spec = SyntheticSpec {
            found_at_1: 0.6,
            num_queries: 10_000,
            ..SyntheticSpec::default()
        };
        let b = generate_synthetic(&spec, 2024).unwrap();
        let ones = gold_ranks(&b).iter().filter(|&&r| r == 1).count();
        let frac = ones as f64 / 10_000.0;
        assert!((frac - 0.6).abs() <= 0.015, "{frac}");
    }

    #[test]
    fn presets_parse() {
        for p in PRESETS {
            SyntheticSpec::preset(p).unwrap().validate().unwrap();
        }
        assert!(SyntheticSpec::preset("huge").is_err());
    }
}
