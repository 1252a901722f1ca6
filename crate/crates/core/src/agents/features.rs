//! Normalized learner inputs derived from an environment [`State`].

use serde::{Deserialize, Serialize};

use crate::env::State;
use crate::scorer::RankedList;

pub const FEATURE_COUNT: usize = 6;

/// `log2 N` is divided by this so registries up to ~10^6 map into [0, 1].
const LOG2_N_REFERENCE: f64 = 20.0;

/// Affine map that puts raw scorer outputs on a common footing.
///
/// Fitted on training lists: `offset` is the mean per-list minimum score and
/// `scale` the mean per-list score range. Scorers with very different
/// magnitudes (BM25 vs cosine) then yield comparable features.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreScale {
    pub offset: f64,
    pub scale: f64,
}

impl Default for ScoreScale {
    fn default() -> Self {
        Self {
            offset: 0.0,
            scale: 1.0,
        }
    }
}

impl ScoreScale {
    pub fn fit<'a>(lists: impl IntoIterator<Item = &'a RankedList>) -> Self {
        let mut count = 0usize;
        let mut min_sum = 0.0;
        let mut range_sum = 0.0;
        for list in lists {
            if list.is_empty() {
                continue;
            }
            let top = list.score_at(1);
            let bottom = list.score_at(list.len());
            min_sum += bottom;
            range_sum += top - bottom;
            count += 1;
        }
        if count == 0 {
            return Self::default();
        }
        let range = range_sum / count as f64;
        Self {
            offset: min_sum / count as f64,
            scale: if range > 0.0 && range.is_finite() { range } else { 1.0 },
        }
    }

    /// `[top, gap, spread, k/N, log2 N / 20, ceiling / log2 N]`.
    pub fn features(&self, s: &State) -> [f64; FEATURE_COUNT] {
        let n = s.registry_size as f64;
        let log2_n = libm::log2(n);
        let ceiling = if log2_n > 0.0 { s.ceiling.value() / log2_n } else { 0.0 };
        [
            (s.top_score - self.offset) / self.scale,
            s.gap_first_to_current / self.scale,
            s.spread / self.scale,
            s.depth as f64 / n,
            log2_n / LOG2_N_REFERENCE,
            ceiling,
        ]
    }
}

/// Histogram-style binning of the continuous features.
///
/// Score features use quantile edges fitted on training states; depth
/// fraction and ceiling use uniform edges over [0, 1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discretizer {
    /// Interior edges per binned feature, each strictly increasing.
    pub edges: Vec<Vec<f64>>,
}

/// Features that get binned, as indices into the feature array.
pub const BINNED: [usize; 5] = [0, 1, 2, 3, 5];

/// Depths up to this value get their own category.
pub const EXACT_DEPTH_LIMIT: usize = 32;

pub type StateKey = [u16; 6];

impl Discretizer {
    pub fn uniform(bins: usize) -> Self {
        let edges = uniform_edges(bins);
        Self {
            edges: vec![edges; BINNED.len()],
        }
    }

    /// Quantile edges for the three score features, uniform for the rest.
    pub fn fit(samples: &[[f64; FEATURE_COUNT]], bins: usize) -> Self {
        let mut out = Self::uniform(bins);
        for slot in 0..3 {
            let feature = BINNED[slot];
            let mut values: Vec<f64> = samples.iter().map(|f| f[feature]).collect();
            if values.is_empty() {
                continue;
            }
            values.sort_by(f64::total_cmp);
            let mut edges: Vec<f64> = Vec::with_capacity(bins.saturating_sub(1));
            for i in 1..bins {
                let idx = (i * values.len()) / bins;
                let v = values[idx.min(values.len() - 1)];
                if edges.last().is_none_or(|&last| v > last) {
                    edges.push(v);
                }
            }
            out.edges[slot] = edges;
        }
        out
    }

    pub fn key(&self, features: &[f64; FEATURE_COUNT], depth: usize) -> StateKey {
        let mut key = [0u16; 6];
        for (slot, &feature) in BINNED.iter().enumerate() {
            let edges = &self.edges[slot];
            key[slot] = edges.partition_point(|&e| e <= features[feature]) as u16;
        }
        key[5] = depth_category(depth);
        key
    }
}

fn uniform_edges(bins: usize) -> Vec<f64> {
    (1..bins).map(|i| i as f64 / bins as f64).collect()
}

/// Exact depth up to [`EXACT_DEPTH_LIMIT`], then one category per doubling.
pub fn depth_category(depth: usize) -> u16 {
    if depth <= EXACT_DEPTH_LIMIT {
        depth as u16
    } else {
        let doublings = usize::BITS - (depth.div_ceil(EXACT_DEPTH_LIMIT) - 1).leading_zeros();
        (EXACT_DEPTH_LIMIT as u32 + doublings) as u16
    }
}
