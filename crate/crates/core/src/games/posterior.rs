use crate::error::{invalid, Error, Result};
use crate::exact::GEOMETRIC_TAIL_MASS;
use crate::numeric::ln_binomial;
use crate::prior::SampleSizeDistribution;

/// Conditional law of the number of items given `k` arrivals by time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    /// `(n, P(N = n | N_t = k))`, sorted by `n`, zero-probability points omitted.
    pub points: Vec<(u64, f64)>,
}

impl Posterior {
    pub fn prob(&self, n: u64) -> f64 {
        self.points.iter().find(|p| p.0 == n).map_or(0.0, |p| p.1)
    }

    pub fn total(&self) -> f64 {
        self.points.iter().map(|p| p.1).sum()
    }
}

/// Support used for Bayesian updates: geometric priors are truncated at
/// [`GEOMETRIC_TAIL_MASS`] and renormalised.
pub(crate) fn working_support(nu: &SampleSizeDistribution) -> Vec<(u64, f64)> {
    let (points, rest) = nu.support(GEOMETRIC_TAIL_MASS);
    let scale = 1.0 / (1.0 - rest);
    points.into_iter().map(|(n, w)| (n, w * scale)).collect()
}

/// `P(n | N_t = k) ∝ ν_n C(n,k) t^k (1-t)^{n-k}`.
pub fn posterior(nu: &SampleSizeDistribution, t: f64, k: u64) -> Result<Posterior> {
    if !(0.0..=1.0).contains(&t) {
        return Err(invalid(format!("time {t} is outside [0, 1]")));
    }
    let support = working_support(nu);
    let degenerate = || Error::DegenerateState(format!("no support point is consistent with {k} arrivals by time {t}"));
    // The factor t^k is common to all n; it only matters when it vanishes.
    if t == 0.0 && k > 0 {
        return Err(degenerate());
    }
    let logs: Vec<(u64, f64)> = support
        .iter()
        .filter(|&&(n, _)| n >= k)
        .filter_map(|&(n, w)| {
            let m = (n - k) as f64;
            let tail = if m == 0.0 { 0.0 } else { m * (-t).ln_1p() };
            let l = w.ln() + ln_binomial(n, k) + tail;
            l.is_finite().then_some((n, l))
        })
        .collect();
    let max = logs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if logs.is_empty() || !max.is_finite() {
        return Err(degenerate());
    }
    let total: f64 = logs.iter().map(|p| (p.1 - max).exp()).sum();
    let points = logs
        .into_iter()
        .map(|(n, l)| (n, (l - max).exp() / total))
        .filter(|p| p.1 > 0.0)
        .collect();
    Ok(Posterior { points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_is_fixed() {
        let nu = SampleSizeDistribution::point_mass(7).unwrap();
        for (t, k) in [(0.0, 0), (0.3, 2), (0.99, 7)] {
            assert_eq!(posterior(&nu, t, k).unwrap().points, vec![(7, 1.0)]);
        }
        assert!(matches!(posterior(&nu, 0.5, 8), Err(Error::DegenerateState(_))));
    }

    #[test]
    fn prior_at_time_zero() {
        let nu = SampleSizeDistribution::finite(vec![(2, 0.25), (5, 0.75)]).unwrap();
        let p = posterior(&nu, 0.0, 0).unwrap();
        assert!((p.prob(2) - 0.25).abs() < 1e-15);
        assert!((p.prob(5) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn too_many_arrivals_rule_out_small_n() {
        let nu = SampleSizeDistribution::finite(vec![(10, 0.5), (100, 0.5)]).unwrap();
        let p = posterior(&nu, 0.01, 11).unwrap();
        assert_eq!(p.points, vec![(100, 1.0)]);
    }

    #[test]
    fn matches_direct_bayes() {
        let nu = SampleSizeDistribution::finite(vec![(1, 0.2), (3, 0.3), (4, 0.5)]).unwrap();
        let (t, k) = (0.4, 1u64);
        let lik = |n: u64| crate::numeric::binomial_pmf(n, k, t);
        let z = 0.2 * lik(1) + 0.3 * lik(3) + 0.5 * lik(4);
        let p = posterior(&nu, t, k).unwrap();
        assert!((p.prob(3) - 0.3 * lik(3) / z).abs() < 1e-14);
        assert!((p.total() - 1.0).abs() < 1e-12);
    }
}
