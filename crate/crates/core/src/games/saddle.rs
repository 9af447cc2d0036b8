//! Two small zero-sum games in which the adversary mixes over two numbers
//! of items.
//!
//! - Example 1: `ν = (1, 4; 1-p, p)`; the strategy accepts the first arrival
//!   iff it comes after `1 - b` and otherwise plays the 2-strategy.
//! - Example 2: `ν = (3, 6; 1-p, p)`; the strategy has cutoffs
//!   `(1, 1 - b, 0, …)`: index 2 is accepted after `1 - b`, index `>= 3`
//!   always.
//!
//! In both games the value of the adversary's prior increases with `p` on
//! `[p*, 1]` although the prior increases in the stochastic order.

use std::fmt;

use crate::error::Result;
use crate::exact::rational;
use crate::numeric::{self, binomial_pmf};
use crate::prior::{stochastic_order_compare, SampleSizeDistribution, StochasticOrder};

use super::best_response::{best_response, DEFAULT_GRID};

/// Number of grid points used for the equalizer check.
pub const EQUALIZER_GRID: usize = 1001;
/// Number of grid points on `[p*, 1]` for the monotonicity check.
pub const MONOTONE_GRID: usize = 21;
/// Smallest increment that counts as strict growth.
pub const MONOTONE_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    Example1,
    Example2,
}

impl Example {
    pub fn support(self) -> (u64, u64) {
        match self {
            Example::Example1 => (1, 4),
            Example::Example2 => (3, 6),
        }
    }

    /// `ν = (n1, n2; 1-p, p)`.
    pub fn prior(self, p: f64) -> Result<SampleSizeDistribution> {
        let (n1, n2) = self.support();
        SampleSizeDistribution::two_point(n1, n2, p)
    }

    /// Payoff `w(b, p)`.
    pub fn payoff(self, b: f64, p: f64) -> f64 {
        match self {
            Example::Example1 => game_example1(b, p),
            Example::Example2 => {
                let (f1, f2) = game_example2(b);
                (1.0 - p) * f1 + p * f2
            }
        }
    }

    /// Best response `b(p)`.
    pub fn best_b(self, p: f64) -> f64 {
        match self {
            Example::Example1 => example1_best_b(p),
            Example::Example2 => example2_best_b(p),
        }
    }

    /// `max_b w(b, p)`.
    pub fn optimal_value(self, p: f64) -> f64 {
        self.payoff(self.best_b(p), p)
    }

    /// `p` at and below which `b(p) = 1`.
    pub fn threshold(self) -> f64 {
        match self {
            Example::Example1 => 6.0 / 11.0,
            Example::Example2 => 12.0 / 29.0,
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Example::Example1 => "example1",
            Example::Example2 => "example2",
        })
    }
}

/// `w(b, p) = (1-p) b + (p/24)(11 - 5 b^4)`.
pub fn game_example1(b: f64, p: f64) -> f64 {
    (1.0 - p) * b + p / 24.0 * (11.0 - 5.0 * b.powi(4))
}

/// Maximiser of `b ↦ w(b, p)`: `∂w/∂b = (1-p) - (5p/6) b^3`.
pub fn example1_best_b(p: f64) -> f64 {
    if p <= 6.0 / 11.0 {
        1.0
    } else {
        (6.0 * (1.0 - p) / (5.0 * p)).cbrt()
    }
}

fn s(d: u64, n: u64) -> f64 {
    use num_traits::ToPrimitive;
    rational::win_prob_d(d, n).expect("small arguments").to_f64().expect("finite")
}

/// `(f1, f2)`: winning probabilities on 3 and 6 items.
pub fn game_example2(b: f64) -> (f64, f64) {
    let a = 1.0 - b;
    // β(k, n): k of the n arrivals come before the cutoff 1 - b.
    let beta = |k: u64, n: u64| binomial_pmf(n, k, a);
    let low3 = beta(0, 3) + beta(1, 3);
    let f1 = low3 * s(2, 3) + (1.0 - low3) * s(3, 3);
    let low6 = beta(0, 6) + beta(1, 6);
    let f2 = low6 * s(2, 6) + (1.0 - low6) * s(3, 6);
    (f1, f2)
}

/// `(17/72) b^6 - (17/60) b^5 + (1/3) b^3 - (1/2) b^2 + 17/180`, which
/// equals `f2 - f1`.
pub fn example2_sextic(b: f64) -> f64 {
    17.0 / 72.0 * b.powi(6) - 17.0 / 60.0 * b.powi(5) + b.powi(3) / 3.0 - b * b / 2.0 + 17.0 / 180.0
}

/// Maximiser of `b ↦ w(b, p)`, from
/// `∂w/∂b = b(b-1)(17 b^3 p + 12 p - 12) / 12`.
pub fn example2_best_b(p: f64) -> f64 {
    if p <= 12.0 / 29.0 {
        1.0
    } else {
        (12.0 * (1.0 - p) / (17.0 * p)).cbrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleReport {
    pub example: Example,
    pub b_star: f64,
    pub p_star: f64,
    /// `p*` from the first-order condition `b(p*) = b*`.
    pub p_star_closed_form: f64,
    pub value: f64,
    /// Threshold below which the best response is `b = 1`.
    pub threshold: f64,
    /// `max_p |w(b*, p) - value|` over a grid on `[0, 1]`.
    pub equalizer_check: f64,
    /// `(p, max_b w(b, p))` on a grid over `[p*, 1]`.
    pub monotonicity_segment: Vec<(f64, f64)>,
}

impl SaddleReport {
    /// Smallest increment along the monotonicity segment.
    pub fn min_increment(&self) -> f64 {
        self.monotonicity_segment
            .windows(2)
            .map(|w| w[1].1 - w[0].1)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.min_increment() > MONOTONE_MARGIN
    }
}

fn equalizer_check(example: Example, b: f64, value: f64) -> f64 {
    (0..EQUALIZER_GRID)
        .map(|i| {
            let p = i as f64 / (EQUALIZER_GRID - 1) as f64;
            (example.payoff(b, p) - value).abs()
        })
        .fold(0.0, f64::max)
}

fn segment(example: Example, p_star: f64) -> Vec<(f64, f64)> {
    (0..MONOTONE_GRID)
        .map(|i| {
            let p = p_star + (1.0 - p_star) * i as f64 / (MONOTONE_GRID - 1) as f64;
            (p, example.optimal_value(p))
        })
        .collect()
}

/// Saddle point of example 1: `b*` equalizes `w(b, 0) = b` and
/// `w(b, 1) = (11 - 5b^4)/24`.
pub fn game_example1_saddle() -> SaddleReport {
    let (lo, hi) = numeric::bisect(|b| (11.0 - 5.0 * b.powi(4)) / 24.0 - b, 0.0, 1.0, 1e-16, 200)
        .expect("sign change on [0, 1]");
    let b_star = 0.5 * (lo + hi);
    let p_star_closed_form = 6.0 / (6.0 + 5.0 * b_star.powi(3));
    let ex = Example::Example1;
    let p_star = numeric::golden_section_min(|p| ex.optimal_value(p), ex.threshold(), 1.0, 1e-12);
    SaddleReport {
        example: ex,
        b_star,
        p_star,
        p_star_closed_form,
        value: b_star,
        threshold: ex.threshold(),
        equalizer_check: equalizer_check(ex, b_star, b_star),
        monotonicity_segment: segment(ex, p_star),
    }
}

/// Saddle point of example 2: `b*` solves `f1(b) = f2(b)`.
pub fn game_example2_saddle() -> SaddleReport {
    let (lo, hi) = numeric::bisect(
        |b| {
            let (f1, f2) = game_example2(b);
            f1 - f2
        },
        0.0,
        1.0,
        1e-16,
        200,
    )
    .expect("sign change on [0, 1]");
    let b_star = 0.5 * (lo + hi);
    let ex = Example::Example2;
    let value = game_example2(b_star).0;
    let p_star_closed_form = 12.0 / (12.0 + 17.0 * b_star.powi(3));
    let p_star = numeric::golden_section_min(|p| ex.optimal_value(p), ex.threshold(), 1.0, 1e-12);
    SaddleReport {
        example: ex,
        b_star,
        p_star,
        p_star_closed_form,
        value,
        threshold: ex.threshold(),
        equalizer_check: equalizer_check(ex, b_star, value),
        monotonicity_segment: segment(ex, p_star),
    }
}

pub fn saddle(example: Example) -> SaddleReport {
    match example {
        Example::Example1 => game_example1_saddle(),
        Example::Example2 => game_example2_saddle(),
    }
}

/// `(min_p max_b w, max_b min_p w)` over uniform grids.
pub fn saddle_gap(example: Example, grid: usize) -> (f64, f64) {
    let pts: Vec<f64> = (0..=grid).map(|i| i as f64 / grid as f64).collect();
    let upper = pts
        .iter()
        .map(|&p| pts.iter().map(|&b| example.payoff(b, p)).fold(f64::NEG_INFINITY, f64::max))
        .fold(f64::INFINITY, f64::min);
    let lower = pts
        .iter()
        .map(|&b| pts.iter().map(|&p| example.payoff(b, p)).fold(f64::INFINITY, f64::min))
        .fold(f64::NEG_INFINITY, f64::max);
    (upper, lower)
}

/// Two priors ordered stochastically whose optimal values are ordered the
/// other way from what heavier tails would suggest.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub example: Example,
    pub p_a: f64,
    pub p_b: f64,
    pub order: StochasticOrder,
    pub value_a: f64,
    pub value_b: f64,
    /// Optimal values recomputed by the best-response solver.
    pub dp_value_a: f64,
    pub dp_value_b: f64,
    /// True iff `ν_b` dominates `ν_a` and `value_b > value_a + 1e-6`.
    pub refutes_monotonicity: bool,
}

impl fmt::Display for CounterexampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order == StochasticOrder::Equal {
            return write!(f, "{}: priors equal, no counter-example", self.example);
        }
        write!(
            f,
            "{}: p={} -> {:.9}, p={} -> {:.9}, order {:?}, counter-example: {}",
            self.example, self.p_a, self.value_a, self.p_b, self.value_b, self.order, self.refutes_monotonicity
        )
    }
}

/// Compare the priors at `p_a < p_b`, analytically and by dynamic programming.
pub fn monotonicity_check(example: Example, p_a: f64, p_b: f64) -> Result<CounterexampleReport> {
    let nu_a = example.prior(p_a)?;
    let nu_b = example.prior(p_b)?;
    let order = stochastic_order_compare(&nu_a, &nu_b)?;
    let value_a = example.optimal_value(p_a);
    let value_b = example.optimal_value(p_b);
    let dp_value_a = best_response(&nu_a, DEFAULT_GRID)?.value;
    let dp_value_b = best_response(&nu_b, DEFAULT_GRID)?.value;
    let refutes_monotonicity = order == StochasticOrder::Nu2Dominates && value_b > value_a + MONOTONE_MARGIN;
    Ok(CounterexampleReport {
        example,
        p_a,
        p_b,
        order,
        value_a,
        value_b,
        dp_value_a,
        dp_value_b,
        refutes_monotonicity,
    })
}

/// The counter-example at `p_a = p*`, `p_b = 1`.
pub fn monotonicity_counterexample(example: Example) -> Result<CounterexampleReport> {
    let p_star = saddle(example).p_star;
    monotonicity_check(example, p_star, 1.0)
}
