//! Strategy representations.
//!
//! A [`CutoffStrategy`] is the Markovian class: a record that is the `k`-th
//! arrival (a record of *index* `k`) is accepted iff it arrives at a time
//! `t >= a_k`. Threshold rules on the arrival count (d-strategies) and pure
//! time thresholds (x-strategies) are the two extreme special cases.
//!
//! A [`BranchingStrategy`] switches between two time thresholds depending on
//! whether anything arrived before a switch time; it is not Markovian in
//! `(t, N_t)`.

use std::fmt;

use crate::error::{invalid, Result};

/// Per-index acceptance cutoffs `a_1, …, a_m` followed by a constant tail.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffStrategy {
    cutoffs: Vec<f64>,
    tail: f64,
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {v} is outside [0, 1]")))
    }
}

impl CutoffStrategy {
    pub fn new(cutoffs: Vec<f64>, tail: f64) -> Result<Self> {
        for (i, &a) in cutoffs.iter().enumerate() {
            check_unit(&format!("cutoff a_{}", i + 1), a)?;
        }
        check_unit("tail cutoff", tail)?;
        Ok(Self { cutoffs, tail })
    }

    /// Explicit cutoffs `a_1..a_m`.
    pub fn cutoffs(&self) -> &[f64] {
        &self.cutoffs
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Cutoff for a record of index `k` (1-based).
    pub fn cutoff(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        self.cutoffs.get(k - 1).copied().unwrap_or(self.tail)
    }

    /// `a_1, …, a_n`.
    pub fn effective(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.cutoff(k)).collect()
    }

    /// True iff `a_1 >= a_2 >= … >= a_m >= tail`.
    pub fn is_nonincreasing(&self) -> bool {
        self.cutoffs
            .iter()
            .chain(std::iter::once(&self.tail))
            .zip(self.cutoffs.iter().chain(std::iter::once(&self.tail)).skip(1))
            .all(|(a, b)| a >= b)
    }

    /// Replace the cutoff of index `k`, extending the explicit list with the
    /// tail value when needed.
    pub fn with_cutoff(&self, k: usize, value: f64) -> Result<Self> {
        if k == 0 {
            return Err(invalid("cutoff indices start at 1"));
        }
        check_unit(&format!("cutoff a_{k}"), value)?;
        let mut cutoffs = self.cutoffs.clone();
        if cutoffs.len() < k {
            cutoffs.resize(k, self.tail);
        }
        cutoffs[k - 1] = value;
        Ok(Self { cutoffs, tail: self.tail })
    }
}

impl fmt::Display for CutoffStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cutoffs:")?;
        for (i, a) in self.cutoffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ";tail={}", self.tail)
    }
}

/// Skip the first `d - 1` arrivals, then take the first record.
pub fn make_d_strategy(d: u64) -> Result<CutoffStrategy> {
    if d == 0 {
        return Err(invalid("d must be at least 1"));
    }
    Ok(CutoffStrategy {
        cutoffs: vec![1.0; (d - 1) as usize],
        tail: 0.0,
    })
}

/// Take the first record arriving at or after time `x`.
pub fn make_x_strategy(x: f64) -> Result<CutoffStrategy> {
    check_unit("x", x)?;
    Ok(CutoffStrategy { cutoffs: Vec::new(), tail: x })
}

/// Play `τ_x` if something arrived by `switch_time`, otherwise `τ_{x'}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchingStrategy {
    switch_time: f64,
    if_nonempty: f64,
    if_empty: f64,
}

impl BranchingStrategy {
    /// Requires `0 <= y <= x <= 1` and `y <= x' <= 1`.
    pub fn new(switch_time: f64, if_nonempty: f64, if_empty: f64) -> Result<Self> {
        check_unit("switch time", switch_time)?;
        check_unit("cutoff if nonempty", if_nonempty)?;
        check_unit("cutoff if empty", if_empty)?;
        if if_nonempty < switch_time || if_empty < switch_time {
            return Err(invalid(format!(
                "both branch cutoffs must be at least the switch time {switch_time}"
            )));
        }
        Ok(Self { switch_time, if_nonempty, if_empty })
    }

    pub fn switch_time(&self) -> f64 {
        self.switch_time
    }

    pub fn if_nonempty(&self) -> f64 {
        self.if_nonempty
    }

    pub fn if_empty(&self) -> f64 {
        self.if_empty
    }
}

impl fmt::Display for BranchingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "branching:y={},x={},x'={}",
            self.switch_time, self.if_nonempty, self.if_empty
        )
    }
}

/// Any strategy the library can evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Cutoff(CutoffStrategy),
    Branching(BranchingStrategy),
}

impl From<CutoffStrategy> for Strategy {
    fn from(s: CutoffStrategy) -> Self {
        Strategy::Cutoff(s)
    }
}

impl From<BranchingStrategy> for Strategy {
    fn from(s: BranchingStrategy) -> Self {
        Strategy::Branching(s)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Cutoff(s) => s.fmt(f),
            Strategy::Branching(s) => s.fmt(f),
        }
    }
}
