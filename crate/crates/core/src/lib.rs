//! Chance-corrected selectivity (Bits-over-Random) for "select K of N"
//! shortlists, and reinforcement-learning policies that pick the shortlist
//! depth per query using it as a reward.

pub mod agents;
pub mod config;
pub mod env;
pub mod error;
pub mod harness;
pub mod metric;
pub mod report;
pub mod scorer;

pub use error::{Error, Result};
/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
/// Output order always follows input order.
#[cfg(feature = "parallel")]
pub fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}
