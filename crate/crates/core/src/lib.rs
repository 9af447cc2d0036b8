//! Stopping strategies for the best-choice problem with uniformly random
//! arrival times and an unknown number of items.
//!
//! The crate is organised around a handful of engines:
//!
//! - [`exact`]: closed-form winning probabilities for threshold, time-cutoff
//!   and general nonincreasing cutoff strategies, plus mixtures over a prior
//!   on the number of items.
//! - [`simulate`]: an independent Monte Carlo oracle that runs arbitrary
//!   stopping rules on sampled arrival sequences.
//! - [`dominance`]: pairwise dominance verdicts and the constructions that
//!   improve on the 1/e-strategy.
//! - [`minimax`]: right-shifted cutoff vectors that keep the guaranteed
//!   1/e winning probability.
//! - [`games`]: priors chosen by an adversary, best responses by dynamic
//!   programming and the worked saddle-point games.
//!
//! The [`cli`] module backs the `bestchoice` binary.

pub mod cli;
pub mod dominance;
mod error;
pub mod exact;
pub mod games;
pub mod minimax;
pub mod numeric;
pub mod prior;
pub mod report;
pub mod simulate;
pub mod strategy;

pub use error::{Error, Result};
pub use prior::{stochastic_order_compare, SampleSizeDistribution, StochasticOrder};
pub use report::{EvaluationReport, Method};
pub use strategy::{make_d_strategy, make_x_strategy, BranchingStrategy, CutoffStrategy, Strategy};

/// `1/e`, the cutoff of the classic time-threshold strategy.
pub const INV_E: f64 = 0.367_879_441_171_442_33;

/// Largest number of items any exact evaluation accepts.
pub const MAX_ITEMS: u64 = 1_000_000;
