//! Optimal stopping against a known prior by backward induction on a time
//! grid.
//!
//! The state is `(t, k)`: time `t` and `k` arrivals so far, the last of which
//! was not taken. Given `N = n`, the remaining `n - k` arrivals are uniform
//! on `(t, 1)`, the next one arrives at `T` with density
//! `m (1-u)^{m-1} / (1-t)^m` (`m = n - k`), and it is a record with
//! probability `1/(k+1)`. Writing
//!
//! ```text
//! g(s, k+1) = max(q, V)(s, k+1) / (k+1) + V(s, k+1) k / (k+1),
//! V(t, k)   = Σ_n P(n | t, k) m J_{n,k}(t),
//! J_{n,k}(t) = ∫_t^1 (1-u)^{m-1} g(u, k+1) du / (1-t)^m,
//! ```
//!
//! where `q(t, k) = Σ_n P(n | t, k) k / n` is the value of stopping, the
//! integral obeys the one-step recurrence
//! `J(t_i) = ρ^m J(t_{i+1}) + (1 - ρ^m)/m · ḡ` with
//! `ρ = (1 - t_{i+1}) / (1 - t_i)` and `ḡ` the trapezoid average of `g`.
//! The `ρ^m` factor is exact, so a prior concentrated on one `n` is solved
//! without discretisation error.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::numeric::ln_binomial;
use crate::prior::SampleSizeDistribution;
use crate::simulate::{Arrival, StoppingRule};

use super::posterior::working_support;

/// Default number of grid steps.
pub const DEFAULT_GRID: usize = 20_000;
/// Value change between grid `G` and `G/2` above which results are flagged.
pub const ACCURACY_THRESHOLD: f64 = 1e-3;
/// Largest support point the solver accepts.
pub const MAX_SUPPORT: u64 = 5_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t <= self.end
    }
}

/// Acceptance times per record index, at grid resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptancePolicy {
    /// `regions[k - 1]`: times at which a record of index `k` is accepted.
    pub regions: Vec<Vec<Interval>>,
    /// Optimal winning probability `V(0, 0)`.
    pub value: f64,
    pub grid_size: usize,
    /// `V(0, 0)` on a grid of half the size.
    pub coarse_value: f64,
    pub accuracy_warning: bool,
}

impl AcceptancePolicy {
    pub fn max_index(&self) -> usize {
        self.regions.len()
    }

    pub fn region(&self, k: usize) -> &[Interval] {
        self.regions.get(k.wrapping_sub(1)).map_or(&[], Vec::as_slice)
    }

    /// Whether a record of index `k` at time `t` is accepted, using the
    /// nearest grid point.
    pub fn accepts(&self, k: usize, t: f64) -> bool {
        let g = self.grid_size as f64;
        let snapped = (t * g).round() / g;
        self.region(k).iter().any(|i| i.contains(snapped))
    }

    pub fn never_accepts(&self, k: usize) -> bool {
        self.region(k).is_empty()
    }

    pub fn always_accepts(&self, k: usize) -> bool {
        matches!(self.region(k), [i] if i.start == 0.0 && i.end == 1.0)
    }

    /// Whether the acceptance set of index `k` is a single interval.
    pub fn is_interval(&self, k: usize) -> bool {
        self.region(k).len() <= 1
    }
}

impl StoppingRule for AcceptancePolicy {
    fn stop(&self, t: f64, k: usize, _: &[Arrival]) -> bool {
        self.accepts(k, t)
    }
}

struct Solution {
    value: f64,
    regions: Vec<Vec<Interval>>,
}

/// Posterior weights `P(n | t_i, k)` for every grid point, one row per `n`.
fn posterior_rows(support: &[(u64, f64)], k: u64, times: &[f64]) -> Vec<(u64, Vec<f64>)> {
    let live: Vec<(u64, f64)> = support
        .iter()
        .filter(|p| p.0 >= k)
        .map(|&(n, w)| (n, w.ln() + ln_binomial(n, k)))
        .collect();
    let n_min = live.first().map(|p| p.0);
    let g = times.len() - 1;
    let mut rows: Vec<(u64, Vec<f64>)> = live.iter().map(|p| (p.0, vec![0.0; g + 1])).collect();
    for (i, &t) in times.iter().enumerate() {
        if i == g {
            // Left limit at t = 1: all mass on the smallest consistent n.
            for (n, row) in rows.iter_mut() {
                row[i] = (Some(*n) == n_min) as u8 as f64;
            }
            continue;
        }
        let l1t = (-t).ln_1p();
        let logs: Vec<f64> = live.iter().map(|&(n, b)| b + (n - k) as f64 * l1t).collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = logs.iter().map(|l| (l - max).exp()).sum();
        for (row, l) in rows.iter_mut().zip(&logs) {
            row.1[i] = (l - max).exp() / total;
        }
    }
    rows
}

fn solve(support: &[(u64, f64)], grid: usize) -> Solution {
    let n_bar = support.last().map_or(0, |p| p.0);
    let times: Vec<f64> = (0..=grid).map(|i| i as f64 / grid as f64).collect();
    // Layer n_bar: no further arrivals are possible.
    let mut v_next = vec![0.0; grid + 1];
    let mut q_next = vec![1.0; grid + 1];
    let mut regions = vec![Vec::new(); n_bar as usize];
    regions[n_bar as usize - 1] = accepted_intervals(&q_next, &v_next, &times);
    for k in (0..n_bar).rev() {
        let kf = k as f64;
        let g: Vec<f64> = q_next
            .iter()
            .zip(&v_next)
            .map(|(&q, &v)| (q.max(v) + kf * v) / (kf + 1.0))
            .collect();
        let rows = posterior_rows(support, k, &times);
        let contributions: Vec<Vec<f64>> = rows
            .par_iter()
            .filter(|(n, _)| *n > k)
            .map(|(n, post)| {
                let m = (n - k) as i32;
                let mf = m as f64;
                let mut out = vec![0.0; grid + 1];
                let mut j = g[grid] / mf;
                out[grid] = post[grid] * mf * j;
                for i in (0..grid).rev() {
                    let rho = (1.0 - times[i + 1]) / (1.0 - times[i]);
                    let r = rho.powi(m);
                    j = r * j + (1.0 - r) / mf * 0.5 * (g[i] + g[i + 1]);
                    out[i] = post[i] * mf * j;
                }
                out
            })
            .collect();
        let mut v = vec![0.0; grid + 1];
        for c in &contributions {
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi += ci;
            }
        }
        if k > 0 {
            let mut q = vec![0.0; grid + 1];
            for (n, post) in &rows {
                let ratio = kf / *n as f64;
                for (qi, pi) in q.iter_mut().zip(post) {
                    *qi += pi * ratio;
                }
            }
            regions[k as usize - 1] = accepted_intervals(&q, &v, &times);
            q_next = q;
        }
        v_next = v;
    }
    Solution { value: v_next[0], regions }
}

/// Runs of grid points with `q >= V` (ties accept).
fn accepted_intervals(q: &[f64], v: &[f64], times: &[f64]) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for i in 0..times.len() {
        let accept = q[i] >= v[i];
        match (accept, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push(Interval { start: times[s], end: times[i - 1] });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Interval { start: times[s], end: times[times.len() - 1] });
    }
    out
}

/// Optimal strategy against `nu`. Requires `grid_size >= 10 n̄` where `n̄` is
/// the largest support point (after truncating geometric priors).
pub fn best_response(nu: &SampleSizeDistribution, grid_size: usize) -> Result<AcceptancePolicy> {
    let support = working_support(nu);
    let n_bar = support.last().map_or(0, |p| p.0);
    if n_bar > MAX_SUPPORT {
        return Err(invalid(format!("support reaches n = {n_bar}; the solver handles n <= {MAX_SUPPORT}")));
    }
    if (grid_size as u64) < 10 * n_bar {
        return Err(invalid(format!("grid size {grid_size} is below 10 × {n_bar}")));
    }
    let fine = solve(&support, grid_size);
    let coarse = solve(&support, grid_size / 2);
    Ok(AcceptancePolicy {
        regions: fine.regions,
        value: fine.value,
        grid_size,
        coarse_value: coarse.value,
        accuracy_warning: (fine.value - coarse.value).abs() > ACCURACY_THRESHOLD,
    })
}
