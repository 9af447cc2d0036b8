use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::prior::SampleSizeDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    MonteCarlo,
}

/// Winning probabilities of one strategy, per number of items and
/// (optionally) mixed over a prior.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub strategy: String,
    pub method: Method,
    pub per_n: BTreeMap<u64, f64>,
    /// Standard errors, present for Monte Carlo reports.
    pub stderr: Option<BTreeMap<u64, f64>>,
    pub mixture_value: Option<f64>,
    /// Bound on the truncation error of `mixture_value` (geometric priors)
    /// or its standard error (Monte Carlo).
    pub mixture_error: Option<f64>,
}

impl EvaluationReport {
    pub fn new(strategy: impl Into<String>, method: Method) -> Self {
        Self {
            strategy: strategy.into(),
            method,
            per_n: BTreeMap::new(),
            stderr: (method == Method::MonteCarlo).then(BTreeMap::new),
            mixture_value: None,
            mixture_error: None,
        }
    }

    pub fn insert(&mut self, n: u64, p: f64, stderr: Option<f64>) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("probability {p} at n = {n} outside [0, 1]")));
        }
        self.per_n.insert(n, p);
        if let (Some(map), Some(se)) = (self.stderr.as_mut(), stderr) {
            map.insert(n, se);
        }
        Ok(())
    }

    /// Mixture over a finite prior whose whole support is already in `per_n`.
    pub fn mix_finite(&mut self, nu: &SampleSizeDistribution) -> Result<f64> {
        let (points, _) = nu.support(0.0);
        let mut value = 0.0;
        let mut var = 0.0;
        for (n, w) in points {
            let p = *self
                .per_n
                .get(&n)
                .ok_or_else(|| invalid(format!("no per-n value for n = {n}")))?;
            value += w * p;
            if let Some(se) = self.stderr.as_ref().and_then(|m| m.get(&n)) {
                var += w * w * se * se;
            }
        }
        self.mixture_value = Some(value);
        if self.stderr.is_some() {
            self.mixture_error = Some(var.sqrt());
        }
        Ok(value)
    }
}
