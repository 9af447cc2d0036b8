//! Small numerical kernels shared by the evaluation engines.

/// Neumaier's variant of Kahan compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut acc = CompensatedSum::new();
    for i in 1..=k {
        acc.add(((n - k + i) as f64 / i as f64).ln());
    }
    acc.value()
}

/// `C(n, k)` as a float, computed multiplicatively. Exact for moderate `n`.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n > 1000 {
        return ln_binomial(n, k).exp();
    }
    let mut c = 1.0_f64;
    for i in 1..=k {
        c = c * (n - k + i) as f64 / i as f64;
    }
    c.round()
}

/// Binomial probability `C(n,k) x^k (1-x)^(n-k)`.
pub fn binomial_pmf(n: u64, k: u64, x: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if x <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if x >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    if n <= 1000 {
        let direct = binomial(n, k) * x.powi(k as i32) * (1.0 - x).powi((n - k) as i32);
        if direct.is_normal() {
            return direct;
        }
    }
    (ln_binomial(n, k) + k as f64 * x.ln() + (n - k) as f64 * (-x).ln_1p()).exp()
}

/// The full probability vector of `Binomial(n, x)` together with its upper
/// tails `P(X >= k)`.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    pmf: Vec<f64>,
    upper: Vec<f64>,
}

impl BinomialTable {
    pub fn new(n: u64, x: f64) -> Self {
        let len = n as usize + 1;
        let mut pmf = vec![0.0; len];
        if x <= 0.0 {
            pmf[0] = 1.0;
        } else if x >= 1.0 {
            pmf[len - 1] = 1.0;
        } else {
            // Start from the mode and walk outwards with term ratios; this
            // avoids underflow of x^n at large n.
            let mode = (((n + 1) as f64 * x).floor() as u64).min(n);
            pmf[mode as usize] = binomial_pmf(n, mode, x);
            let odds = x / (1.0 - x);
            for j in mode..n {
                let next = pmf[j as usize] * (n - j) as f64 / (j + 1) as f64 * odds;
                pmf[j as usize + 1] = next;
                if next == 0.0 {
                    break;
                }
            }
            for j in (1..=mode).rev() {
                let prev = pmf[j as usize] * j as f64 / (n - j + 1) as f64 / odds;
                pmf[j as usize - 1] = prev;
                if prev == 0.0 {
                    break;
                }
            }
        }
        let mut upper = vec![0.0; len + 1];
        let mut acc = CompensatedSum::new();
        for j in (0..len).rev() {
            acc.add(pmf[j]);
            upper[j] = acc.value();
        }
        Self { pmf, upper }
    }

    pub fn pmf(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    /// `P(X >= k)`; zero beyond `n`.
    pub fn upper_tail(&self, k: usize) -> f64 {
        self.upper.get(k).copied().unwrap_or(0.0)
    }
}

/// Root of a continuous function with a sign change on `[lo, hi]`.
///
/// Returns the bracket `(lo, hi)` after convergence; `lo` keeps the sign of
/// `f(lo)` on entry. Stops when the bracket is narrower than `tol` or after
/// `max_iter` halvings.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> Option<(f64, f64)> {
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some((lo, lo));
    }
    if f_hi == 0.0 {
        return Some((hi, hi));
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    let lo_sign = f_lo.signum();
    for _ in 0..max_iter {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return Some((mid, mid));
        }
        if v.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo, hi))
}

/// Largest `x` in `[lo, hi]` for which a monotone predicate still holds,
/// assuming `pred(lo)` is true and the feasible set is an interval starting
/// at `lo`.
pub fn bisect_last_true<F: FnMut(f64) -> bool>(
    mut pred: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> f64 {
    if pred(hi) {
        return hi;
    }
    for _ in 0..max_iter {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Golden-section search for the minimiser of a unimodal function.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
