//! Distributions of the number of items (the adversary's mixed strategies).

use crate::error::{invalid, Error, Result};
use crate::MAX_ITEMS;

const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    PointMass(u64),
    Finite(Vec<(u64, f64)>),
    Geometric(f64),
}

/// Borrowed view of a [`SampleSizeDistribution`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorKind<'a> {
    PointMass(u64),
    /// Support points sorted by `n`, weights strictly positive.
    Finite(&'a [(u64, f64)]),
    /// `ν_n = θ (θ+1)^(-n)`, `n >= 1`.
    Geometric(f64),
}

/// A probability distribution on the positive integers.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSizeDistribution {
    repr: Repr,
}

impl SampleSizeDistribution {
    pub fn point_mass(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("the number of items must be positive"));
        }
        Ok(Self { repr: Repr::PointMass(n) })
    }

    /// Finite support given as `(n, weight)` pairs. Weights must be strictly
    /// positive and sum to one; the `n` must be distinct and positive.
    pub fn finite(mut points: Vec<(u64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("empty support"));
        }
        points.sort_by_key(|&(n, _)| n);
        for w in points.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(invalid(format!("support point {} listed twice", w[0].0)));
            }
        }
        for &(n, w) in &points {
            if n == 0 {
                return Err(invalid("support points must be positive"));
            }
            if !(w > 0.0 && w <= 1.0) {
                return Err(invalid(format!("weight {w} at n = {n} is not in (0, 1]")));
            }
        }
        let total: f64 = points.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { repr: Repr::Finite(points) })
    }

    pub fn geometric(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(invalid(format!("geometric parameter θ = {theta} must be positive")));
        }
        Ok(Self { repr: Repr::Geometric(theta) })
    }

    /// `ν_{n1} = 1 - p`, `ν_{n2} = p`; zero-weight points are dropped.
    pub fn two_point(n1: u64, n2: u64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("mixing weight {p} outside [0, 1]")));
        }
        if p == 0.0 {
            Self::point_mass(n1)
        } else if p == 1.0 {
            Self::point_mass(n2)
        } else {
            Self::finite(vec![(n1, 1.0 - p), (n2, p)])
        }
    }

    pub fn kind(&self) -> PriorKind<'_> {
        match &self.repr {
            Repr::PointMass(n) => PriorKind::PointMass(*n),
            Repr::Finite(p) => PriorKind::Finite(p),
            Repr::Geometric(t) => PriorKind::Geometric(*t),
        }
    }

    pub fn is_geometric(&self) -> bool {
        matches!(self.repr, Repr::Geometric(_))
    }

    pub fn weight(&self, n: u64) -> f64 {
        match &self.repr {
            Repr::PointMass(m) => (n == *m) as u8 as f64,
            Repr::Finite(p) => p.iter().find(|q| q.0 == n).map_or(0.0, |q| q.1),
            Repr::Geometric(t) => {
                if n == 0 {
                    0.0
                } else {
                    t * (-(n as f64) * t.ln_1p()).exp()
                }
            }
        }
    }

    /// Largest support point, `None` for unbounded support.
    pub fn max_support(&self) -> Option<u64> {
        match &self.repr {
            Repr::PointMass(n) => Some(*n),
            Repr::Finite(p) => p.last().map(|q| q.0),
            Repr::Geometric(_) => None,
        }
    }

    /// `P(N >= m)`.
    pub fn tail_prob(&self, m: u64) -> f64 {
        match &self.repr {
            Repr::PointMass(n) => (*n >= m) as u8 as f64,
            Repr::Finite(p) => p.iter().filter(|q| q.0 >= m).map(|q| q.1).sum(),
            Repr::Geometric(t) => {
                if m <= 1 {
                    1.0
                } else {
                    (-((m - 1) as f64) * t.ln_1p()).exp()
                }
            }
        }
    }

    /// Support points with weights. Geometric priors are cut where the
    /// remaining tail mass drops below `tail_mass` (or at [`MAX_ITEMS`]); the
    /// discarded mass is returned alongside.
    pub fn support(&self, tail_mass: f64) -> (Vec<(u64, f64)>, f64) {
        match &self.repr {
            Repr::PointMass(n) => (vec![(*n, 1.0)], 0.0),
            Repr::Finite(p) => (p.clone(), 0.0),
            Repr::Geometric(t) => {
                let log_ratio = -t.ln_1p();
                let mut points = Vec::new();
                let mut n = 1u64;
                loop {
                    points.push((n, t * (n as f64 * log_ratio).exp()));
                    let remaining = (n as f64 * log_ratio).exp();
                    if remaining < tail_mass || n >= MAX_ITEMS {
                        return (points, remaining);
                    }
                    n += 1;
                }
            }
        }
    }
}

/// Outcome of comparing two priors in the usual stochastic order
/// (heavier tails are larger).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StochasticOrder {
    Nu2Dominates,
    Nu1Dominates,
    Equal,
    Incomparable,
}

/// Compare `nu1` and `nu2` through their tail sums `P(N >= m)`.
pub fn stochastic_order_compare(
    nu1: &SampleSizeDistribution,
    nu2: &SampleSizeDistribution,
) -> Result<StochasticOrder> {
    const TOL: f64 = 1e-12;
    match (nu1.kind(), nu2.kind()) {
        (PriorKind::Geometric(t1), PriorKind::Geometric(t2)) => Ok(if t1 == t2 {
            StochasticOrder::Equal
        } else if t2 < t1 {
            StochasticOrder::Nu2Dominates
        } else {
            StochasticOrder::Nu1Dominates
        }),
        (PriorKind::Geometric(_), _) | (_, PriorKind::Geometric(_)) => {
            Err(Error::UnsupportedComparison(
                "cannot compare a geometric prior with a finite one".into(),
            ))
        }
        _ => {
            let top = nu1.max_support().max(nu2.max_support()).unwrap_or(1);
            let (mut some_greater, mut some_less) = (false, false);
            for m in 1..=top {
                let d = nu2.tail_prob(m) - nu1.tail_prob(m);
                if d > TOL {
                    some_greater = true;
                } else if d < -TOL {
                    some_less = true;
                }
            }
            Ok(match (some_greater, some_less) {
                (false, false) => StochasticOrder::Equal,
                (true, false) => StochasticOrder::Nu2Dominates,
                (false, true) => StochasticOrder::Nu1Dominates,
                (true, true) => StochasticOrder::Incomparable,
            })
        }
    }
}
