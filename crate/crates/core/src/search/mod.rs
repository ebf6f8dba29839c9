//! Optimal strategies by three routes: exhaustive enumeration of the Markov
//! encoder class with MAP decoders, dynamic programming over reachable outer
//! beliefs, and random sampling of general strategies as a refutation test.

mod brute;
mod dp;
mod falsify;

pub use brute::{brute_force_markov, markov_class_size, BruteOptions, DEFAULT_ENCODER_CAP};
pub use dp::{coordinator_dp, DpOptions, DpResult};
pub use falsify::{falsify_structural, FalsifyOptions, FalsifyReport, Verdict};

use std::fmt;
use std::time::Duration;

use crate::strategy::MarkovStrategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Brute,
    Dp,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Brute => "brute",
            Method::Dp => "dp",
        })
    }
}

/// Outcome of an optimization. `best` is a table strategy achieving
/// `best_cost` exactly (for the dynamic program, the lowered structured
/// optimum).
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<S> {
    pub method: Method,
    pub best_cost: S,
    pub best: MarkovStrategy,
    /// Number of candidates scored: complete encoders for enumeration,
    /// node actions for the dynamic program.
    pub enumerated: u128,
    pub elapsed: Duration,
}
