//! Dominance verdicts between strategies and constructions that beat the
//! 1/e-strategy on some or all numbers of items.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::exact;
use crate::strategy::{make_x_strategy, BranchingStrategy, CutoffStrategy, Strategy};
use crate::INV_E;

/// Differences at or below this size are treated as ties.
pub const STRICT_TOL: f64 = 1e-12;

/// `c = 2 - √3`, the maximiser of `p_3`.
pub fn restart_cutoff() -> f64 {
    2.0 - 3f64.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Dominates,
    StronglyDominatesOnZ,
    Dominated,
    Incomparable,
    Equal,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Relation::Dominates => "dominates",
            Relation::StronglyDominatesOnZ => "strongly dominates on Z",
            Relation::Dominated => "is dominated by",
            Relation::Incomparable => "is incomparable with",
            Relation::Equal => "equal",
        })
    }
}

/// Large-`n` limits of the two winning probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptotics {
    pub limit_a: f64,
    pub limit_b: f64,
}

/// Result of [`compare`]: `diffs[n] = W(a, n) - W(b, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceVerdict {
    pub relation: Relation,
    /// `n` where `a` is strictly better.
    pub witness_set: Vec<u64>,
    /// `n` where `a` is strictly worse.
    pub loss_set: Vec<u64>,
    pub diffs: BTreeMap<u64, f64>,
    pub asymptotic: Option<Asymptotics>,
}

/// `-x log x`, with the value 0 at `x = 0`.
pub fn x_log_limit(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// `lim_n W(τ, n)` where it follows from the cutoff structure: a cutoff
/// strategy whose cutoffs settle at `x` (and which does not accept the very
/// first arrival at time 0 unconditionally) tends to `-x log x`.
pub fn asymptotic_limit(strategy: &Strategy) -> Option<f64> {
    match strategy {
        Strategy::Cutoff(s) => {
            if s.cutoff(1) > 0.0 || s.tail() == 0.0 {
                Some(x_log_limit(s.tail()))
            } else {
                None
            }
        }
        // With many items N_y > 0 almost surely.
        Strategy::Branching(b) => Some(x_log_limit(if b.switch_time() > 0.0 {
            b.if_nonempty()
        } else {
            b.if_empty()
        })),
    }
}

/// Exact `W(τ, n)`; non-monotone cutoff vectors are rejected.
pub fn exact_win_prob(strategy: &Strategy, n: u64) -> Result<f64> {
    exact::win_prob(strategy, n)
}

/// Compare `a` against `b` on `n = 1..=n_max`. With `z`, the verdict is
/// strong dominance on `z` when `a` is strictly better at every point of it.
pub fn compare(a: &Strategy, b: &Strategy, n_max: u64, z: Option<&[u64]>) -> Result<DominanceVerdict> {
    compare_range(a, b, 1, n_max, z)
}

/// [`compare`] restricted to `n_min..=n_max`.
pub fn compare_range(
    a: &Strategy,
    b: &Strategy,
    n_min: u64,
    n_max: u64,
    z: Option<&[u64]>,
) -> Result<DominanceVerdict> {
    if n_min == 0 || n_min > n_max {
        return Err(invalid(format!("invalid range {n_min}..{n_max}")));
    }
    if let Some(z) = z {
        if z.is_empty() {
            return Err(invalid("Z must not be empty"));
        }
        if let Some(&bad) = z.iter().find(|&&n| n < n_min || n > n_max) {
            return Err(invalid(format!("Z contains {bad}, outside {n_min}..={n_max}")));
        }
    }
    let diffs: BTreeMap<u64, f64> = (n_min..=n_max)
        .into_par_iter()
        .map(|n| Ok((n, exact_win_prob(a, n)? - exact_win_prob(b, n)?)))
        .collect::<Result<_>>()?;
    let witness_set: Vec<u64> = diffs.iter().filter(|(_, &d)| d > STRICT_TOL).map(|(&n, _)| n).collect();
    let loss_set: Vec<u64> = diffs.iter().filter(|(_, &d)| d < -STRICT_TOL).map(|(&n, _)| n).collect();
    let strong_on_z = z.is_some_and(|z| z.iter().all(|n| diffs[n] > STRICT_TOL));
    let relation = match (witness_set.is_empty(), loss_set.is_empty()) {
        (false, true) => Relation::Dominates,
        _ if strong_on_z => Relation::StronglyDominatesOnZ,
        (true, true) => Relation::Equal,
        (true, false) => Relation::Dominated,
        (false, false) => Relation::Incomparable,
    };
    let asymptotic = asymptotic_limit(a)
        .zip(asymptotic_limit(b))
        .map(|(limit_a, limit_b)| Asymptotics { limit_a, limit_b });
    Ok(DominanceVerdict { relation, witness_set, loss_set, diffs, asymptotic })
}

/// Skip-first strategy: cutoff `a1` for the first arrival, `x` afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct SkipFirst {
    pub strategy: CutoffStrategy,
    pub a1: f64,
    pub x: f64,
}

pub fn build_skip_first(a1: f64, x: f64) -> Result<SkipFirst> {
    if !(x > 0.0 && x < a1 && a1 <= 1.0) {
        return Err(invalid(format!("skip-first needs 0 < x < a1 <= 1, got a1 = {a1}, x = {x}")));
    }
    Ok(SkipFirst { strategy: CutoffStrategy::new(vec![a1], x)?, a1, x })
}

impl SkipFirst {
    /// `Δ(n) = W(τ, n) - p_n(x) = [(1-x)^n - (1-a1)^n] (s(2,n) - s(1,n))`.
    ///
    /// The bracket is the probability that exactly the first arrival falls in
    /// `[x, a1)`, where the two strategies differ.
    pub fn advantage(&self, n: u64) -> Result<f64> {
        let gain = match n {
            0 => return Err(invalid("the number of items must be positive")),
            1 => -1.0,
            2 => 0.0,
            _ => exact::harmonic_tail(3, n)? / n as f64,
        };
        let nf = n as f64;
        let window = (nf * (-self.x).ln_1p()).exp() - (nf * (-self.a1).ln_1p()).exp();
        Ok(window * gain)
    }

    pub fn win_prob(&self, n: u64) -> Result<f64> {
        exact::win_prob_cutoff(&self.strategy, n)
    }
}

/// Restart strategy: `τ_x` if something arrived by `y`, otherwise the
/// `p_3`-optimal cutoff `c` rescaled to `[y, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Restart {
    pub strategy: BranchingStrategy,
    pub x: f64,
    pub y: f64,
}

pub fn build_restart(x: f64, y: f64) -> Result<Restart> {
    let c = restart_cutoff();
    if !(x > c && x <= 1.0) {
        return Err(invalid(format!("restart needs c = {c:.6} < x <= 1, got x = {x}")));
    }
    let lower = ((x - c) / (1.0 - c)).max(0.0);
    if !(y > lower && y <= x) {
        return Err(invalid(format!("restart needs {lower:.6} < y <= x, got y = {y}")));
    }
    let strategy = BranchingStrategy::new(y, x, c * (1.0 - y) + y)?;
    Ok(Restart { strategy, x, y })
}

impl Restart {
    /// `p_n(c) - p_n((x-y)/(1-y))`.
    pub fn bracket(&self, n: u64) -> Result<f64> {
        if self.y >= 1.0 {
            return Ok(0.0);
        }
        let z = ((self.x - self.y) / (1.0 - self.y)).clamp(0.0, 1.0);
        Ok(exact::win_prob_x(n, restart_cutoff())? - exact::win_prob_x(n, z)?)
    }

    /// `Δ(n) = W(τ, n) - p_n(x) = (1-y)^n [p_n(c) - p_n((x-y)/(1-y))]`.
    pub fn advantage(&self, n: u64) -> Result<f64> {
        let empty = (n as f64 * (-self.y).ln_1p()).exp();
        Ok(empty * self.bracket(n)?)
    }

    pub fn win_prob(&self, n: u64) -> Result<f64> {
        exact::win_prob_branching(&self.strategy, n)
    }
}

/// Block-wise cutoffs below 1/e that beat `τ_{1/e}` for every `n <= n_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderPlan {
    /// `n_1 > n_2 > … > 0`, with `n_{j+1} = d*(n_j) - 1`.
    pub ladder: Vec<u64>,
    /// `c_1 < c_2 < … < 1/e`; block `j` covers indices `n_{j+1} < k <= n_j`.
    pub block_cutoffs: Vec<f64>,
    /// Minimum advantage over `(n_{j+1}, n_1]` after stage `j`.
    pub advantage_floors: Vec<f64>,
    pub strategy: CutoffStrategy,
}

impl LadderPlan {
    /// `W(τ', n) - p_n(1/e)`.
    pub fn advantage(&self, n: u64) -> Result<f64> {
        Ok(exact::win_prob_cutoff(&self.strategy, n)? - exact::win_prob_x(n, INV_E)?)
    }

    /// Smallest `n` in `(n_1, n_max]` where the strategy loses to `τ_{1/e}`.
    pub fn loss_witness(&self, n_max: u64) -> Result<Option<u64>> {
        let start = self.ladder[0] + 1;
        let losses: Vec<u64> = (start..=n_max)
            .into_par_iter()
            .map(|n| Ok((n, self.advantage(n)?)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|&(_, d)| d < -STRICT_TOL)
            .map(|(n, _)| n)
            .collect();
        Ok(losses.first().copied())
    }
}

/// `n_1, d*(n_1) - 1, …, 0`.
pub fn ladder(n1: u64) -> Result<Vec<u64>> {
    if n1 == 0 {
        return Err(invalid("n1 must be positive"));
    }
    let mut rungs = vec![n1];
    let mut n = n1;
    while n > 0 {
        n = exact::optimal_d(n)? - 1;
        rungs.push(n);
    }
    Ok(rungs)
}

fn ladder_strategy(rungs: &[u64], cutoffs: &[f64]) -> Result<CutoffStrategy> {
    // Index k in block j (n_{j+1} < k <= n_j) gets cutoffs[j]; blocks not yet
    // processed stay at 1/e. Indices beyond n_1 reuse the first block's value.
    let n1 = rungs[0] as usize;
    let mut a = vec![INV_E; n1];
    for (j, &c) in cutoffs.iter().enumerate() {
        for k in rungs[j + 1] as usize + 1..=rungs[j] as usize {
            a[k - 1] = c;
        }
    }
    let tail = cutoffs.first().copied().unwrap_or(INV_E);
    CutoffStrategy::new(a, tail)
}

fn min_advantage(strategy: &CutoffStrategy, range: std::ops::RangeInclusive<u64>, base: &[f64]) -> Result<f64> {
    range
        .into_par_iter()
        .map(|n| Ok(exact::win_prob_cutoff(strategy, n)? - base[n as usize]))
        .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))
}

/// Ladder construction with advantage floor factor 1/2.
pub fn build_finite_z_dominator(n1: u64) -> Result<LadderPlan> {
    build_finite_z_dominator_with(n1, 0.5)
}

/// Build a strategy beating `τ_{1/e}` on `1..=n1`.
///
/// Stage `j` lowers the cutoffs of block `j` from 1/e to some `c_j` between
/// `c_{j-1}` and 1/e. Lowering cutoffs of indices `k >= d*(n)` raises `w_n`,
/// so block `j` helps every `n` it reaches, while the previous blocks'
/// advantage may shrink; `floor_factor` bounds that shrinkage.
pub fn build_finite_z_dominator_with(n1: u64, floor_factor: f64) -> Result<LadderPlan> {
    if !(floor_factor > 0.0 && floor_factor < 1.0) {
        return Err(invalid(format!("floor factor {floor_factor} must lie in (0, 1)")));
    }
    let rungs = ladder(n1)?;
    let base: Vec<f64> = (0..=n1)
        .map(|n| if n == 0 { Ok(0.0) } else { exact::win_prob_x(n, INV_E) })
        .collect::<Result<_>>()?;
    let mut cutoffs: Vec<f64> = Vec::new();
    let mut floors: Vec<f64> = Vec::new();
    for j in 0..rungs.len() - 1 {
        let (hi, lo_n) = (rungs[j], rungs[j + 1]);
        let lower_bound = cutoffs.last().copied().unwrap_or(0.0);
        let incumbent = floors.last().copied();
        let mut delta = 0.5 * (INV_E - lower_bound);
        let mut chosen = None;
        for _ in 0..60 {
            let c = INV_E - delta;
            if c > lower_bound {
                let mut trial = cutoffs.clone();
                trial.push(c);
                let strategy = ladder_strategy(&rungs, &trial)?;
                let block = min_advantage(&strategy, lo_n + 1..=hi, &base)?;
                let kept = match incumbent {
                    Some(alpha) if hi < n1 => min_advantage(&strategy, hi + 1..=n1, &base)? >= floor_factor * alpha,
                    _ => true,
                };
                if block > STRICT_TOL && kept {
                    let upper = if hi < n1 { min_advantage(&strategy, hi + 1..=n1, &base)? } else { f64::INFINITY };
                    chosen = Some((c, block.min(upper)));
                    break;
                }
            }
            delta *= 0.5;
        }
        let (c, alpha) = chosen.ok_or_else(|| Error::ConstructionFailed {
            stage: format!("block {} (indices {}..={})", j + 1, lo_n + 1, hi),
            reason: "no cutoff below 1/e met the advantage constraints within 60 halvings".into(),
        })?;
        cutoffs.push(c);
        floors.push(alpha);
    }
    let strategy = ladder_strategy(&rungs, &cutoffs)?;
    let worst = min_advantage(&strategy, 1..=n1, &base)?;
    if worst <= STRICT_TOL {
        return Err(Error::ConstructionFailed {
            stage: "final verification".into(),
            reason: format!("minimum advantage {worst:e} on 1..={n1} is not strictly positive"),
        });
    }
    Ok(LadderPlan { ladder: rungs, block_cutoffs: cutoffs, advantage_floors: floors, strategy })
}

/// `τ_{1/e}` as a [`Strategy`].
pub fn one_over_e() -> Strategy {
    make_x_strategy(INV_E).expect("1/e lies in [0, 1]").into()
}
