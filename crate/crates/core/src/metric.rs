//! Bits-over-Random: chance-corrected selectivity for "select K of N" tasks.
//!
//! The random baseline is the hypergeometric probability that a uniformly
//! drawn K-subset of N candidates contains at least one of the R relevant
//! items. All arithmetic stays in log space so corpora with millions of
//! candidates never materialize a binomial coefficient.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::env::EpisodeTrace;
use crate::error::{Error, Result};

/// Above this many factors the product form is replaced by log-gamma differences.
const PRODUCT_FORM_LIMIT: u64 = 1 << 12;

/// One "select K of N with R relevant" setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SelectionContext {
    corpus_size: u64,
    relevant: u64,
    depth: u64,
}

impl SelectionContext {
    pub fn new(corpus_size: u64, relevant: u64, depth: u64) -> Result<Self> {
        if corpus_size == 0 || relevant == 0 || depth == 0 {
            return Err(Error::domain(format!(
                "N, R and K must be positive (N={corpus_size}, R={relevant}, K={depth})"
            )));
        }
        if relevant > corpus_size {
            return Err(Error::domain(format!(
                "relevant count R={relevant} exceeds corpus size N={corpus_size}"
            )));
        }
        if depth > corpus_size {
            return Err(Error::domain(format!(
                "depth K={depth} exceeds corpus size N={corpus_size}"
            )));
        }
        Ok(Self {
            corpus_size,
            relevant,
            depth,
        })
    }

    pub fn corpus_size(&self) -> u64 {
        self.corpus_size
    }

    pub fn relevant(&self) -> u64 {
        self.relevant
    }

    pub fn depth(&self) -> u64 {
        self.depth
    }
}

/// A selectivity value in bits. May be negative infinity when nothing was found.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bits(f64);

impl Bits {
    /// Zero observed success: worse than any finite selectivity.
    pub const NEG_INFINITY: Bits = Bits(f64::NEG_INFINITY);
    pub const ZERO: Bits = Bits(0.0);

    pub fn new(value: f64) -> Self {
        Bits(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_neg_infinite(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_neg_infinite() {
            f.write_str("-inf")
        } else if let Some(p) = f.precision() {
            write!(f, "{:.*}", p, self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Probability that a random K-subset contains at least one relevant item.
///
/// Returns exactly `K/N` for a single relevant item.
pub fn p_rand(ctx: SelectionContext) -> f64 {
    if ctx.relevant == 1 {
        return ctx.depth as f64 / ctx.corpus_size as f64;
    }
    p_rand_log_space(ctx)
}

/// The general hypergeometric path with no `R = 1` shortcut.
///
/// `1 - C(N-R, K) / C(N, K)` is evaluated as `-expm1(ln ratio)`. The log ratio
/// is a sum of `ln1p` terms over `min(R, K)` factors, falling back to
/// log-gamma differences when that product would be very long.
pub fn p_rand_log_space(ctx: SelectionContext) -> f64 {
    let SelectionContext {
        corpus_size: n,
        relevant: r,
        depth: k,
    } = ctx;
    if k > n - r {
        return 1.0;
    }
    -libm::expm1(ln_miss_probability(n, r, k))
}

/// `ln(C(N-R, K) / C(N, K))`, the log-probability that a random K-subset misses
/// every relevant item. Requires `K <= N - R`.
fn ln_miss_probability(n: u64, r: u64, k: u64) -> f64 {
    let (short, long) = if r <= k { (r, k) } else { (k, r) };
    if short <= PRODUCT_FORM_LIMIT {
        // C(N-R,K)/C(N,K) = prod_{j<short} (1 - long / (N - j))
        let long = long as f64;
        (0..short).map(|j| libm::log1p(-long / (n - j) as f64)).sum()
    } else {
        ln_binomial(n - r, k) - ln_binomial(n, k)
    }
}

/// `ln C(n, k)` through log-gamma.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    let (n, k) = (n as f64, k as f64);
    libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
}

/// `log2(p_obs / p_rand)`.
pub fn bor(p_obs: f64, p_rand: f64) -> Result<Bits> {
    if !(p_rand > 0.0 && p_rand <= 1.0) {
        return Err(Error::domain(format!(
            "random baseline must lie in (0, 1], got {p_rand}"
        )));
    }
    if !(0.0..=1.0).contains(&p_obs) {
        return Err(Error::domain(format!(
            "observed success rate must lie in [0, 1], got {p_obs}"
        )));
    }
    if p_obs == 0.0 {
        return Ok(Bits::NEG_INFINITY);
    }
    Ok(Bits(libm::log2(p_obs / p_rand)))
}

/// Selectivity under perfect observed success: `-log2 p_rand`.
pub fn bor_max(ctx: SelectionContext) -> Bits {
    if ctx.relevant == 1 {
        return optimistic_ceiling(ctx.corpus_size, ctx.depth);
    }
    Bits(libm::log2(1.0 / p_rand(ctx)))
}

/// Optimistic ceiling `log2(N/K)`, i.e. [`bor_max`] with one relevant item.
pub fn bor_opt(corpus_size: u64, depth: u64) -> Result<Bits> {
    SelectionContext::new(corpus_size, 1, depth)?;
    Ok(optimistic_ceiling(corpus_size, depth))
}

// Shares the `log2(1 / p)` form with `bor(1, p)` so ceilings and observed
// values agree bit for bit.
fn optimistic_ceiling(corpus_size: u64, depth: u64) -> Bits {
    Bits(libm::log2(1.0 / (depth as f64 / corpus_size as f64)))
}

/// Plateau approximation of the selectivity change when depth moves from
/// `from` to `to`: `-log2(to / from)`.
pub fn doubling_delta(from: u64, to: u64) -> Result<Bits> {
    if from == 0 || to == 0 {
        return Err(Error::domain("depths must be positive"));
    }
    Ok(Bits(-libm::log2(to as f64 / from as f64)))
}

/// Pooled BoR over a test set whose depth varies per query.
///
/// `P_obs` is the found fraction; the random baseline is the mean of the
/// per-query `p_rand(N, R_q, K_q)`.
pub fn aggregate_bor(traces: &[EpisodeTrace], corpus_size: u64) -> Result<Bits> {
    if traces.is_empty() {
        return Err(Error::domain("cannot aggregate BoR over zero traces"));
    }
    let mut found = 0usize;
    let mut baseline = 0.0;
    for trace in traces {
        let relevant = (trace.relevant as u64).min(corpus_size);
        let ctx = SelectionContext::new(corpus_size, relevant, trace.depth as u64)?;
        baseline += p_rand(ctx);
        if trace.found {
            found += 1;
        }
    }
    let count = traces.len() as f64;
    bor(found as f64 / count, baseline / count)
}
