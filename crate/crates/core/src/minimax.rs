//! Minimax cutoff strategies: raise the first cutoffs above 1/e as far as
//! the guarantee `w_n >= 1/e` for every `n` allows.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::exact;
use crate::numeric;
use crate::strategy::CutoffStrategy;
use crate::INV_E;

/// Largest `n` checked when verifying a minimax guarantee.
pub const N_MAX: u64 = 500;
/// Rows of the reference table.
pub const TABLE_N: [u64; 10] = [4, 5, 6, 7, 8, 9, 10, 15, 20, 25];

const MINIMAX_MARGIN: f64 = 1e-10;
const ACTIVE_TOL: f64 = 1e-9;
const CUTOFF_TOL: f64 = 1e-12;

/// One row `(n, w_n, p_n(1/e))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub n: u64,
    pub w: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqualizerResult {
    pub strategy: CutoffStrategy,
    /// Numbers of items whose winning probability is pinned at 1/e.
    pub constrained_n: Vec<u64>,
    pub table: BTreeMap<u64, (f64, f64)>,
    /// Least `n` with `w_n > p_n(1/e)`.
    pub crossover_n: Option<u64>,
}

impl EqualizerResult {
    pub fn cutoffs(&self) -> &[f64] {
        self.strategy.cutoffs()
    }
}

fn strategy_from(cutoffs: Vec<f64>) -> Result<CutoffStrategy> {
    CutoffStrategy::new(cutoffs, INV_E)
}

/// `a_3` from the expansion of `w_3`: with the tail at 1/e,
/// `w_3 = 1/e` reduces to `a_3^3 = a_2^3 - e^{-3}/2`.
pub fn equalizer_a3_closed_form() -> f64 {
    let a2 = (1.0 - 2.0 * INV_E).sqrt();
    (a2.powi(3) - 0.5 * INV_E.powi(3)).cbrt()
}

/// Equalizing cutoffs for the first `m` numbers of items, `m ∈ {1, 2, 3}`.
pub fn equalizer_cutoffs(m: u32) -> Result<EqualizerResult> {
    if !(1..=3).contains(&m) {
        return Err(Error::UnsupportedStrategy(format!(
            "equalizer cutoffs are available for m = 1, 2, 3 (got {m}); use the general right shift"
        )));
    }
    let mut cutoffs = vec![1.0 - INV_E];
    if m >= 2 {
        cutoffs.push((1.0 - 2.0 * INV_E).sqrt());
    }
    if m >= 3 {
        let a2 = cutoffs[1];
        let head = cutoffs.clone();
        let gap = |a: f64| {
            let mut c = head.clone();
            c.push(a);
            exact::win_prob_cutoff(&strategy_from(c).expect("cutoffs in [0, 1]"), 3).expect("nonincreasing")
                - INV_E
        };
        let (lo, hi) = numeric::bisect(gap, INV_E, a2, 1e-15, 200).ok_or_else(|| Error::ConstructionFailed {
            stage: "a_3".into(),
            reason: "w_3 - 1/e does not change sign on (1/e, a_2)".into(),
        })?;
        cutoffs.push(0.5 * (lo + hi));
    }
    let strategy = strategy_from(cutoffs)?;
    let table = TABLE_N
        .iter()
        .map(|&n| Ok((n, (exact::win_prob_cutoff(&strategy, n)?, exact::win_prob_x(n, INV_E)?))))
        .collect::<Result<_>>()?;
    let crossover_n = crossover(&strategy, N_MAX)?;
    Ok(EqualizerResult { strategy, constrained_n: (1..=m as u64).collect(), table, crossover_n })
}

fn crossover(strategy: &CutoffStrategy, n_max: u64) -> Result<Option<u64>> {
    for n in 1..=n_max {
        if exact::win_prob_cutoff(strategy, n)? > exact::win_prob_x(n, INV_E)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// `(n, w_n, p_n(1/e))` for the three-cutoff equalizer at the reference `n`.
pub fn reproduce_table() -> Result<Vec<TableRow>> {
    let eq = equalizer_cutoffs(3)?;
    Ok(eq.table.iter().map(|(&n, &(w, p))| TableRow { n, w, p }).collect())
}

/// `w_n` for `n = 1..=n_max`, computed in parallel.
pub fn values(strategy: &CutoffStrategy, n_max: u64) -> Result<Vec<f64>> {
    (1..=n_max).into_par_iter().map(|n| exact::win_prob_cutoff(strategy, n)).collect()
}

/// One step of the right shift.
#[derive(Debug, Clone, PartialEq)]
pub struct RightShiftStep {
    pub step: usize,
    pub strategy: CutoffStrategy,
    /// `w_n` for `n = 1..=N_MAX`.
    pub values: Vec<f64>,
    /// `(n, w_n)` with the smallest `w_n`.
    pub min_value: (u64, f64),
    /// `n` with `w_n` pinned at 1/e (within 1e-9) while `p_n(1/e)` is not;
    /// for larger `n` every strategy here is that close to 1/e.
    pub active: Vec<u64>,
    /// `n` where the strategy beats / loses to `τ_{1/e}`.
    pub beats: Vec<u64>,
    pub loses: Vec<u64>,
    /// Limit of `w_n` as `n → ∞`; the tail is 1/e, so this is 1/e.
    pub asymptotic: f64,
}

impl RightShiftStep {
    pub fn is_minimax(&self) -> bool {
        self.min_value.1 >= INV_E - MINIMAX_MARGIN
    }
}

fn all_at_least_inv_e(strategy: &CutoffStrategy, from_n: u64) -> bool {
    (from_n.max(1)..=N_MAX).into_par_iter().all(|n| {
        exact::win_prob_cutoff(strategy, n).is_ok_and(|w| w >= INV_E - 1e-14)
    })
}

fn describe(step: usize, strategy: CutoffStrategy, base: &[f64]) -> Result<RightShiftStep> {
    let values = values(&strategy, N_MAX)?;
    let (mut min_n, mut min_w) = (1, f64::INFINITY);
    let (mut active, mut beats, mut loses) = (Vec::new(), Vec::new(), Vec::new());
    for (i, &w) in values.iter().enumerate() {
        let n = i as u64 + 1;
        if w < min_w {
            (min_n, min_w) = (n, w);
        }
        if (w - INV_E).abs() <= ACTIVE_TOL && base[i] - INV_E > ACTIVE_TOL {
            active.push(n);
        }
        let d = w - base[i];
        if d > 1e-12 {
            beats.push(n);
        } else if d < -1e-12 {
            loses.push(n);
        }
    }
    Ok(RightShiftStep {
        step,
        strategy,
        values,
        min_value: (min_n, min_w),
        active,
        beats,
        loses,
        asymptotic: INV_E,
    })
}

/// Raise `a_1, a_2, …, a_steps` one at a time, each to the largest value
/// below its predecessor that keeps `w_n >= 1/e` for all `n <= N_MAX`.
pub fn general_right_shift(steps: usize) -> Result<Vec<RightShiftStep>> {
    if steps == 0 {
        return Err(invalid("at least one step is required"));
    }
    let base: Vec<f64> = (1..=N_MAX).map(|n| exact::win_prob_x(n, INV_E)).collect::<Result<_>>()?;
    let mut cutoffs: Vec<f64> = Vec::new();
    let mut out = Vec::with_capacity(steps);
    for k in 1..=steps {
        let upper = cutoffs.last().copied().unwrap_or(1.0);
        let with = |a: f64| {
            let mut c = cutoffs.clone();
            c.push(a);
            strategy_from(c).expect("cutoffs in [0, 1]")
        };
        if !all_at_least_inv_e(&with(INV_E), k as u64) {
            return Err(Error::ConstructionFailed {
                stage: format!("step {k}"),
                reason: "the guarantee fails even with a_k = 1/e".into(),
            });
        }
        let a = numeric::bisect_last_true(|a| all_at_least_inv_e(&with(a), k as u64), INV_E, upper, CUTOFF_TOL, 200);
        let strategy = with(a);
        cutoffs.push(a);
        let step = describe(k, strategy, &base)?;
        if !step.is_minimax() {
            return Err(Error::ConstructionFailed {
                stage: format!("step {k}"),
                reason: format!("w_{} = {} falls below 1/e", step.min_value.0, step.min_value.1),
            });
        }
        out.push(step);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_two_cutoffs_are_closed_forms() {
        let eq = equalizer_cutoffs(2).unwrap();
        assert!((eq.cutoffs()[0] - (1.0 - INV_E)).abs() < 1e-15);
        assert!((eq.cutoffs()[1] - (1.0 - 2.0 * INV_E).sqrt()).abs() < 1e-15);
        for n in 1..=2 {
            let w = exact::win_prob_cutoff(&eq.strategy, n).unwrap();
            assert!((w - INV_E).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn third_cutoff_matches_expansion() {
        let eq = equalizer_cutoffs(3).unwrap();
        assert!((eq.cutoffs()[2] - equalizer_a3_closed_form()).abs() < 1e-12);
        let w3 = exact::win_prob_cutoff(&eq.strategy, 3).unwrap();
        assert!((w3 - INV_E).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_m() {
        assert!(matches!(equalizer_cutoffs(0), Err(Error::UnsupportedStrategy(_))));
        assert!(matches!(equalizer_cutoffs(4), Err(Error::UnsupportedStrategy(_))));
        assert!(general_right_shift(0).is_err());
    }

    #[test]
    fn crossover_at_five() {
        assert_eq!(equalizer_cutoffs(3).unwrap().crossover_n, Some(5));
    }
}
