//! Monte Carlo oracle for arbitrary stopping rules.
//!
//! Arrival times are `n` sorted uniforms. Relative ranks are drawn directly:
//! the `k`-th arrival has relative rank uniform on `1..=k`, independently of
//! everything else. A record is an arrival of relative rank 1, and the
//! overall best item is the last record, so a stop wins iff no record comes
//! after it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::strategy::{BranchingStrategy, CutoffStrategy, Strategy};

/// Trials per independent random substream.
pub const CHUNK_SIZE: u64 = 1 << 16;

/// One arrival: its time and its rank among the arrivals so far.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    pub time: f64,
    pub rank: u32,
}

impl Arrival {
    pub fn is_record(&self) -> bool {
        self.rank == 1
    }
}

/// A realisation of the arrival process on `n` items.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalSample {
    arrivals: Vec<Arrival>,
}

impl ArrivalSample {
    /// Build a sample from explicit times and relative ranks.
    pub fn from_parts(times: &[f64], ranks: &[u32]) -> Result<Self> {
        if times.is_empty() || times.len() != ranks.len() {
            return Err(invalid("times and ranks must be nonempty and of equal length"));
        }
        if times.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(invalid("arrival times must lie in [0, 1]"));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("arrival times must be strictly increasing"));
        }
        for (k, &r) in ranks.iter().enumerate() {
            if r == 0 || r as usize > k + 1 {
                return Err(invalid(format!("relative rank {r} of arrival {} out of range", k + 1)));
            }
        }
        let arrivals = times
            .iter()
            .zip(ranks)
            .map(|(&time, &rank)| Arrival { time, rank })
            .collect();
        Ok(Self { arrivals })
    }

    pub fn n(&self) -> usize {
        self.arrivals.len()
    }

    pub fn arrivals(&self) -> &[Arrival] {
        &self.arrivals
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.arrivals.iter().map(|a| a.time)
    }

    pub fn relative_ranks(&self) -> impl Iterator<Item = u32> + '_ {
        self.arrivals.iter().map(|a| a.rank)
    }

    /// `N_t`: number of arrivals at or before `t`.
    pub fn count_until(&self, t: f64) -> usize {
        self.arrivals.partition_point(|a| a.time <= t)
    }

    /// 1-based index of the last record, i.e. of the best item.
    pub fn best_index(&self) -> usize {
        self.arrivals.iter().rposition(Arrival::is_record).map_or(0, |i| i + 1)
    }

    /// The same sample with one extra item, worse than all others, arriving
    /// at `time`. Later arrivals keep their relative ranks.
    pub fn with_worst_item(&self, time: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&time) || self.arrivals.iter().any(|a| a.time == time) {
            return Err(invalid("the extra arrival needs a fresh time in [0, 1]"));
        }
        let pos = self.count_until(time);
        let mut arrivals = self.arrivals.clone();
        arrivals.insert(pos, Arrival { time, rank: pos as u32 + 1 });
        Ok(Self { arrivals })
    }
}

/// Draw a sample of `n` arrivals.
pub fn sample_arrivals<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ArrivalSample> {
    if n == 0 {
        return Err(invalid("the number of items must be positive"));
    }
    let mut arrivals = Vec::with_capacity(n);
    fill_sample(n, rng, &mut arrivals);
    Ok(ArrivalSample { arrivals })
}

fn fill_sample<R: Rng + ?Sized>(n: usize, rng: &mut R, out: &mut Vec<Arrival>) {
    out.clear();
    for _ in 0..n {
        out.push(Arrival { time: rng.random::<f64>(), rank: 0 });
    }
    out.sort_unstable_by(|a, b| a.time.total_cmp(&b.time));
    for (k, a) in out.iter_mut().enumerate() {
        a.rank = rng.random_range(1..=k as u32 + 1);
    }
}

/// A stopping rule. It is consulted only at records: `t` is the record's
/// arrival time, `k` its index, and `history` the arrivals so far, ending
/// with the record itself.
pub trait StoppingRule: Sync {
    fn stop(&self, t: f64, k: usize, history: &[Arrival]) -> bool;
}

impl<T: StoppingRule + ?Sized> StoppingRule for &T {
    fn stop(&self, t: f64, k: usize, history: &[Arrival]) -> bool {
        (**self).stop(t, k, history)
    }
}

/// Adapter turning a closure into a [`StoppingRule`].
pub struct FnRule<F>(pub F);

impl<F> StoppingRule for FnRule<F>
where
    F: Fn(f64, usize, &[Arrival]) -> bool + Sync,
{
    fn stop(&self, t: f64, k: usize, history: &[Arrival]) -> bool {
        (self.0)(t, k, history)
    }
}

/// Never stops.
pub struct NeverStop;

impl StoppingRule for NeverStop {
    fn stop(&self, _: f64, _: usize, _: &[Arrival]) -> bool {
        false
    }
}

impl StoppingRule for CutoffStrategy {
    fn stop(&self, t: f64, k: usize, _: &[Arrival]) -> bool {
        t >= self.cutoff(k)
    }
}

impl StoppingRule for BranchingStrategy {
    fn stop(&self, t: f64, _: usize, history: &[Arrival]) -> bool {
        let early = history.first().is_some_and(|a| a.time <= self.switch_time());
        t >= if early { self.if_nonempty() } else { self.if_empty() }
    }
}

impl StoppingRule for Strategy {
    fn stop(&self, t: f64, k: usize, history: &[Arrival]) -> bool {
        match self {
            Strategy::Cutoff(s) => s.stop(t, k, history),
            Strategy::Branching(s) => s.stop(t, k, history),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Win,
    StoppedWrong,
    NoStop,
}

/// 1-based index of the arrival where `rule` stops, if any.
pub fn stopping_index<S: StoppingRule + ?Sized>(rule: &S, sample: &ArrivalSample) -> Option<usize> {
    first_stop(rule, &sample.arrivals)
}

fn first_stop<S: StoppingRule + ?Sized>(rule: &S, arrivals: &[Arrival]) -> Option<usize> {
    arrivals
        .iter()
        .enumerate()
        .find(|(i, a)| a.is_record() && rule.stop(a.time, i + 1, &arrivals[..=*i]))
        .map(|(i, _)| i + 1)
}

fn outcome_of<S: StoppingRule + ?Sized>(rule: &S, arrivals: &[Arrival]) -> Outcome {
    match first_stop(rule, arrivals) {
        None => Outcome::NoStop,
        Some(k) if arrivals[k..].iter().any(Arrival::is_record) => Outcome::StoppedWrong,
        Some(_) => Outcome::Win,
    }
}

/// Play `rule` on one sample.
pub fn run_once<S: StoppingRule + ?Sized>(rule: &S, sample: &ArrivalSample) -> Outcome {
    outcome_of(rule, &sample.arrivals)
}

/// A Monte Carlo estimate of a winning probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub p: f64,
    pub stderr: f64,
    pub wins: u64,
    pub trials: u64,
}

impl Estimate {
    fn from_counts(wins: u64, trials: u64) -> Self {
        let p = wins as f64 / trials as f64;
        Self { p, stderr: (p * (1.0 - p) / trials as f64).sqrt(), wins, trials }
    }

    /// `|p - exact|` in units of the standard error (infinite if the
    /// standard error vanishes and the values differ).
    pub fn z_score(&self, exact: f64) -> f64 {
        let d = (self.p - exact).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }
}

/// Random stream for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Estimate the winning probability of `rule` on `n` items.
///
/// Trials are split into chunks of [`CHUNK_SIZE`], each with its own stream,
/// so the result depends only on `(seed, trials)` and not on the number of
/// worker threads.
pub fn estimate<S: StoppingRule + ?Sized>(rule: &S, n: usize, trials: u64, seed: u64) -> Result<Estimate> {
    if n == 0 {
        return Err(invalid("the number of items must be positive"));
    }
    if trials == 0 {
        return Err(invalid("at least one trial is required"));
    }
    let chunks = trials.div_ceil(CHUNK_SIZE);
    let wins: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(seed, chunk);
            let len = CHUNK_SIZE.min(trials - chunk * CHUNK_SIZE);
            let mut buf = Vec::with_capacity(n);
            let mut wins = 0u64;
            for _ in 0..len {
                fill_sample(n, &mut rng, &mut buf);
                wins += (outcome_of(rule, &buf) == Outcome::Win) as u64;
            }
            wins
        })
        .sum();
    Ok(Estimate::from_counts(wins, trials))
}
