//! Closed-form winning probabilities.
//!
//! Notation follows the usual best-choice conventions:
//!
//! - `h(d, n) = Σ_{j=d}^{n} 1/(j-1)` is the harmonic tail,
//! - `s(d, n)` is the winning probability of the d-strategy on `n` items,
//! - `p_n(x)` is the winning probability of the x-strategy `τ_x`,
//! - `w_n(a)` is the winning probability of the cutoff strategy `a`.
//!
//! For a nonincreasing cutoff vector the strategy becomes "active" the first
//! time an arrival of index `k` comes at or after `a_k`, and from then on it
//! takes the first record. Conditioning on the number `k` of arrivals seen
//! before activation gives
//!
//! ```text
//! w_n(a) = Σ_{k=0}^{n-1} π_{n,k}(a) s(k+1, n),
//! π_{n,k}(a) = P(T_k < a_k, T_{k+1} >= a_{k+1})
//!            = G_k(a_k) - G_k(a_{k+1}) + P(Bin(n, a_{k+1}) = k),
//! ```
//!
//! where `T_k` is the `k`-th order statistic of `n` uniforms and
//! `G_k(x) = P(T_k <= x) = P(Bin(n, x) >= k)`. The difference of `G_k`
//! values is the closed form of `n C(n-1,k-1) ∫ x^{k-1}(1-x)^{n-k} dx`.

use std::collections::HashMap;

use crate::error::{invalid, Error, Result};
use crate::numeric::{self, BinomialTable, CompensatedSum};
use crate::prior::SampleSizeDistribution;
use crate::strategy::{BranchingStrategy, CutoffStrategy, Strategy};
use crate::MAX_ITEMS;

/// Tail mass at which geometric priors are truncated.
pub const GEOMETRIC_TAIL_MASS: f64 = 1e-12;

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(invalid("the number of items must be positive"))
    } else if n > MAX_ITEMS {
        Err(invalid(format!("n = {n} exceeds the exact-evaluation cap {MAX_ITEMS}")))
    } else {
        Ok(())
    }
}

fn check_x(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(invalid(format!("x = {x} is outside [0, 1]")))
    }
}

/// `h(d, n)` and `s(d, n)` for one `n` and every `d`.
#[derive(Debug, Clone)]
pub struct ThresholdTable {
    n: u64,
    // suffix[i] = Σ_{j=i}^{n-1} 1/j for 1 <= i <= n; suffix[0] unused.
    suffix: Vec<f64>,
}

impl ThresholdTable {
    pub fn new(n: u64) -> Result<Self> {
        check_n(n)?;
        let len = n as usize + 1;
        let mut suffix = vec![0.0; len + 1];
        let mut acc = CompensatedSum::new();
        for i in (1..n as usize).rev() {
            acc.add(1.0 / i as f64);
            suffix[i] = acc.value();
        }
        suffix[0] = f64::INFINITY;
        Ok(Self { n, suffix })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `h(d, n)`; `+∞` for `d = 1`.
    pub fn h(&self, d: u64) -> f64 {
        let i = d.saturating_sub(1) as usize;
        self.suffix.get(i).copied().unwrap_or(0.0)
    }

    /// `s(d, n)`.
    pub fn s(&self, d: u64) -> f64 {
        if d == 1 {
            1.0 / self.n as f64
        } else if d > self.n {
            0.0
        } else {
            (d - 1) as f64 / self.n as f64 * self.h(d)
        }
    }

    /// `d*(n)`: the largest `d >= 2` with `h(d, n) >= 1`, else 1.
    pub fn optimal_d(&self) -> u64 {
        let mut best = 1;
        let (mut lo, mut hi) = (2u64, self.n);
        // h is strictly decreasing in d, so binary search on h(d) >= 1.
        while lo <= hi {
            let mid = lo + (hi - lo) / 2;
            if self.h_at_least_one(mid) {
                best = mid;
                lo = mid + 1;
            } else {
                hi = mid - 1;
            }
        }
        best
    }

    fn h_at_least_one(&self, d: u64) -> bool {
        let h = self.h(d);
        if (h - 1.0).abs() > 1e-9 || self.n > rational::MAX_RATIONAL_N {
            return h >= 1.0;
        }
        let exact = rational::harmonic_tail(d, self.n).expect("validated arguments");
        exact.is_some_and(|h| h >= num_rational::BigRational::from_integer(1.into()))
    }
}

/// `h(d, n) = Σ_{j=d}^{n} 1/(j-1)`; `+∞` when `d = 1`, `0` when `d > n`.
pub fn harmonic_tail(d: u64, n: u64) -> Result<f64> {
    if d == 0 {
        return Err(invalid("d must be at least 1"));
    }
    check_n(n)?;
    if d == 1 {
        return Ok(f64::INFINITY);
    }
    Ok(numeric::compensated_sum((d..=n).rev().map(|j| 1.0 / (j - 1) as f64)))
}

/// Winning probability `s(d, n)` of the d-strategy on `n` items.
pub fn win_prob_d(d: u64, n: u64) -> Result<f64> {
    if d == 0 {
        return Err(invalid("d must be at least 1"));
    }
    check_n(n)?;
    Ok(if d == 1 {
        1.0 / n as f64
    } else if d > n {
        0.0
    } else {
        (d - 1) as f64 / n as f64 * harmonic_tail(d, n)?
    })
}

/// Threshold `d*(n)` of the n-optimal d-strategy. The two-way tie at
/// `n = 2` resolves to `d = 2`.
pub fn optimal_d(n: u64) -> Result<u64> {
    Ok(ThresholdTable::new(n)?.optimal_d())
}

/// Exact rational versions of `h` and `s` for small `n`.
pub mod rational {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::Zero;

    use crate::error::{invalid, Result};

    pub const MAX_RATIONAL_N: u64 = 200;

    fn check(d: u64, n: u64) -> Result<()> {
        if d == 0 || n == 0 {
            return Err(invalid("d and n must be positive"));
        }
        if n > MAX_RATIONAL_N {
            return Err(invalid(format!("rational mode supports n <= {MAX_RATIONAL_N}")));
        }
        Ok(())
    }

    /// `h(d, n)`, or `None` for the infinite case `d = 1`.
    pub fn harmonic_tail(d: u64, n: u64) -> Result<Option<BigRational>> {
        check(d, n)?;
        if d == 1 {
            return Ok(None);
        }
        let mut acc = BigRational::zero();
        for j in d..=n {
            acc += BigRational::new(BigInt::from(1), BigInt::from(j - 1));
        }
        Ok(Some(acc))
    }

    /// `s(d, n)` as an exact fraction.
    pub fn win_prob_d(d: u64, n: u64) -> Result<BigRational> {
        check(d, n)?;
        if d == 1 {
            return Ok(BigRational::new(1.into(), BigInt::from(n)));
        }
        if d > n {
            return Ok(BigRational::zero());
        }
        let h = harmonic_tail(d, n)?.expect("d > 1");
        Ok(BigRational::new(BigInt::from(d - 1), BigInt::from(n)) * h)
    }
}

/// Winning probability `p_n(x) = 1 - x - Σ_{k=2}^{n} (1-x)^k / (k(k-1))` of
/// the x-strategy.
pub fn win_prob_x(n: u64, x: f64) -> Result<f64> {
    check_n(n)?;
    check_x(x)?;
    let u = 1.0 - x;
    let mut pw = u;
    let mut acc = CompensatedSum::new();
    for k in 2..=n {
        pw *= u;
        if pw == 0.0 {
            break;
        }
        acc.add(pw / (k * (k - 1)) as f64);
    }
    Ok(1.0 - x - acc.value())
}

/// `p_n'(x) = -1 + Σ_{k=2}^{n} (1-x)^{k-1} / (k-1)`.
pub fn win_prob_x_derivative(n: u64, x: f64) -> Result<f64> {
    check_n(n)?;
    check_x(x)?;
    let u = 1.0 - x;
    let mut pw = 1.0;
    let mut acc = CompensatedSum::new();
    acc.add(-1.0);
    for k in 2..=n {
        pw *= u;
        if pw == 0.0 {
            break;
        }
        acc.add(pw / (k - 1) as f64);
    }
    Ok(acc.value())
}

/// Maximiser `x_n` of `p_n` on `[0, 1]`.
pub fn argmax_x(n: u64) -> Result<f64> {
    check_n(n)?;
    if n <= 2 {
        // p_1 and p_2 are strictly decreasing.
        return Ok(0.0);
    }
    // p_n' is strictly decreasing in x, positive at 0 and equal to -1 at 1.
    let (lo, hi) = numeric::bisect(
        |x| win_prob_x_derivative(n, x).expect("validated"),
        0.0,
        1.0,
        1e-16,
        200,
    )
    .expect("p_n' changes sign on [0, 1] for n >= 3");
    Ok(0.5 * (lo + hi))
}

/// Independent formulas for `p_n(x)`, used to cross-check [`win_prob_x`].
pub mod representations {
    use super::*;

    /// Condition on the number `k` of arrivals before `x` (including `k = 0`).
    pub fn by_conditioning(n: u64, x: f64) -> Result<f64> {
        check_n(n)?;
        check_x(x)?;
        let table = ThresholdTable::new(n)?;
        Ok(numeric::compensated_sum(
            (0..n).map(|k| numeric::binomial_pmf(n, k, x) * table.s(k + 1)),
        ))
    }

    /// Condition on the top `k` items arriving after `x` and the `(k+1)`-st before.
    pub fn by_top_items(n: u64, x: f64) -> Result<f64> {
        check_n(n)?;
        check_x(x)?;
        let u = 1.0 - x;
        let mut acc = CompensatedSum::new();
        let mut pw = 1.0;
        for k in 1..n {
            pw *= u;
            acc.add(x * pw / k as f64);
        }
        acc.add(pw * u / n as f64);
        Ok(acc.value())
    }

    /// Unroll `p_m = p_{m-1} - (1-x)^m / (m(m-1))` from `p_1 = 1 - x`.
    pub fn by_recursion(n: u64, x: f64) -> Result<f64> {
        check_n(n)?;
        check_x(x)?;
        let u = 1.0 - x;
        let mut p = 1.0 - x;
        let mut pw = u;
        for m in 2..=n {
            pw *= u;
            p -= pw / (m * (m - 1)) as f64;
        }
        Ok(p)
    }
}

/// Activation probabilities `π_{n,0}, …, π_{n,n-1}` of a nonincreasing
/// cutoff strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct PiWeights {
    pub n: u64,
    pub weights: Vec<f64>,
}

impl PiWeights {
    pub fn total(&self) -> f64 {
        numeric::compensated_sum(self.weights.iter().copied())
    }

    /// `1 - Σ π_{n,k}`: the probability the strategy never becomes active,
    /// which should equal `a_n^n`.
    pub fn deficit(&self) -> f64 {
        1.0 - self.total()
    }
}

fn require_nonincreasing(strategy: &CutoffStrategy) -> Result<()> {
    if strategy.is_nonincreasing() {
        Ok(())
    } else {
        Err(Error::UnsupportedStrategy(format!(
            "{strategy} has increasing cutoffs; the integral formula needs a nonincreasing vector"
        )))
    }
}

fn pi_vector(strategy: &CutoffStrategy, n: u64) -> Result<Vec<f64>> {
    require_nonincreasing(strategy)?;
    check_n(n)?;
    let a = strategy.effective(n as usize);
    let mut tables: HashMap<u64, BinomialTable> = HashMap::new();
    for &x in &a {
        tables.entry(x.to_bits()).or_insert_with(|| BinomialTable::new(n, x));
    }
    let table = |x: f64| &tables[&x.to_bits()];
    let mut weights = Vec::with_capacity(n as usize);
    weights.push(table(a[0]).pmf(0));
    // a[k - 1] is a_k and a[k] is a_{k+1}.
    for k in 1..n as usize {
        let (upper, lower) = (a[k - 1], a[k]);
        let t_lower = table(lower);
        let band = if upper == lower {
            0.0
        } else {
            (table(upper).upper_tail(k) - t_lower.upper_tail(k)).max(0.0)
        };
        weights.push(band + t_lower.pmf(k));
    }
    Ok(weights)
}

/// `π_{n,k}` for `k = 0..n-1`.
pub fn pi_weights(strategy: &CutoffStrategy, n: u64) -> Result<PiWeights> {
    Ok(PiWeights { n, weights: pi_vector(strategy, n)? })
}

/// Winning probability `w_n(a)` of a nonincreasing cutoff strategy.
pub fn win_prob_cutoff(strategy: &CutoffStrategy, n: u64) -> Result<f64> {
    let pi = pi_vector(strategy, n)?;
    let table = ThresholdTable::new(n)?;
    Ok(numeric::compensated_sum(
        pi.iter().enumerate().map(|(k, p)| p * table.s(k as u64 + 1)),
    ))
}

/// `∂w_n/∂a_k = C(n-1,k-1) a_k^{k-1} (1-a_k)^{n-k} [h(k+1,n) - 1]`, valid when
/// `a_k <= min(a_1, …, a_{k-1})`.
pub fn win_prob_cutoff_partial(strategy: &CutoffStrategy, n: u64, k: u64) -> Result<f64> {
    check_n(n)?;
    if k == 0 || k > n {
        return Err(invalid(format!("index k = {k} must lie in 1..={n}")));
    }
    let ak = strategy.cutoff(k as usize);
    if (1..k as usize).any(|j| strategy.cutoff(j) < ak) {
        return Err(Error::UnsupportedStrategy(format!(
            "a_{k} = {ak} exceeds an earlier cutoff"
        )));
    }
    let h_next = numeric::compensated_sum((k..n).rev().map(|i| 1.0 / i as f64));
    Ok(numeric::binomial_pmf(n - 1, k - 1, ak) * (h_next - 1.0))
}

/// Winning probability of a branching strategy:
/// `p_n(x) + (1-y)^n [p_n((x'-y)/(1-y)) - p_n((x-y)/(1-y))]`.
pub fn win_prob_branching(strategy: &BranchingStrategy, n: u64) -> Result<f64> {
    check_n(n)?;
    let (y, x, xe) = (strategy.switch_time(), strategy.if_nonempty(), strategy.if_empty());
    let base = win_prob_x(n, x)?;
    if y >= 1.0 {
        return Ok(base);
    }
    let empty = (n as f64 * (-y).ln_1p()).exp();
    let rescale = |c: f64| ((c - y) / (1.0 - y)).clamp(0.0, 1.0);
    let swap = win_prob_x(n, rescale(xe))? - win_prob_x(n, rescale(x))?;
    Ok(base + empty * swap)
}

/// Exact winning probability of any strategy with a closed form.
pub fn win_prob(strategy: &Strategy, n: u64) -> Result<f64> {
    match strategy {
        Strategy::Cutoff(s) => win_prob_cutoff(s, n),
        Strategy::Branching(s) => win_prob_branching(s, n),
    }
}

/// `W(τ, ν)` with a bound on the truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureValue {
    pub value: f64,
    pub error_bound: f64,
}

/// `W(τ, ν) = Σ_n ν_n W(τ, n)`. Geometric priors are summed until the
/// remaining mass is below [`GEOMETRIC_TAIL_MASS`]; the leftover mass is the
/// error bound since every `W(τ, n)` lies in `[0, 1]`.
pub fn mixture_value<F>(mut per_n: F, nu: &SampleSizeDistribution) -> Result<MixtureValue>
where
    F: FnMut(u64) -> Result<f64>,
{
    let (points, rest) = nu.support(GEOMETRIC_TAIL_MASS);
    let mut acc = CompensatedSum::new();
    for (n, w) in points {
        acc.add(w * per_n(n)?);
    }
    Ok(MixtureValue { value: acc.value(), error_bound: rest })
}

/// Running `p_n(x)` and `p_n'(x)` for `n = 1, 2, …`.
struct XSeries {
    n: u64,
    x: f64,
    u: f64,
    pw: f64,
    value_sum: CompensatedSum,
    slope_sum: CompensatedSum,
}

impl XSeries {
    fn new(x: f64) -> Self {
        Self {
            n: 1,
            x,
            u: 1.0 - x,
            pw: 1.0 - x,
            value_sum: CompensatedSum::new(),
            slope_sum: CompensatedSum::new(),
        }
    }

    fn value(&self) -> f64 {
        1.0 - self.x - self.value_sum.value()
    }

    fn slope(&self) -> f64 {
        -1.0 + self.slope_sum.value()
    }

    fn advance(&mut self) {
        let k = self.n + 1;
        self.slope_sum.add(self.pw / (k - 1) as f64);
        self.pw *= self.u;
        self.value_sum.add(self.pw / (k * (k - 1)) as f64);
        self.n = k;
    }
}

fn x_mixture(x: f64, nu: &SampleSizeDistribution, slope: bool) -> Result<MixtureValue> {
    check_x(x)?;
    let (points, rest) = nu.support(GEOMETRIC_TAIL_MASS);
    let mut series = XSeries::new(x);
    let mut acc = CompensatedSum::new();
    for (n, w) in points {
        while series.n < n {
            series.advance();
        }
        acc.add(w * if slope { series.slope() } else { series.value() });
    }
    Ok(MixtureValue { value: acc.value(), error_bound: rest })
}

/// `W(τ_x, ν)`, using the recursion in `n` instead of per-n sums.
pub fn mixture_value_x(x: f64, nu: &SampleSizeDistribution) -> Result<MixtureValue> {
    x_mixture(x, nu, false)
}

/// `d/dx W(τ_x, ν)`.
pub fn mixture_derivative_x(x: f64, nu: &SampleSizeDistribution) -> Result<MixtureValue> {
    x_mixture(x, nu, true)
}
