#![allow(dead_code)]

//! Exact oracles shared by the integration tests.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use bestchoice::exact::rational;

/// Binomial numerators `C(n,j) m^j (D-m)^{n-j}` over the common denominator
/// `D^n`, `D = 2^bits`, for the dyadic point `m / D`.
fn binomial_numerators(n: u64, m: &BigInt, d: &BigInt) -> Vec<BigInt> {
    let n = n as usize;
    let q = d - m;
    let mut pow_m = vec![BigInt::one(); n + 1];
    let mut pow_q = vec![BigInt::one(); n + 1];
    for j in 1..=n {
        pow_m[j] = &pow_m[j - 1] * m;
        pow_q[j] = &pow_q[j - 1] * &q;
    }
    let mut choose = BigInt::one();
    (0..=n)
        .map(|j| {
            let term = &choose * &pow_m[j] * &pow_q[n - j];
            choose = &choose * BigInt::from(n - j) / BigInt::from(j + 1);
            term
        })
        .collect()
}

/// `w_n` of the nonincreasing cutoff vector `a_k = m[k-1] / 2^bits`
/// (`m.len() >= n`), in exact arithmetic.
pub fn win_prob_dyadic(m: &[BigInt], bits: u32, n: u64) -> BigRational {
    assert!(m.len() as u64 >= n);
    let d = BigInt::one() << bits;
    let tables: Vec<(Vec<BigInt>, Vec<BigInt>)> = m[..n as usize]
        .iter()
        .map(|mk| {
            let pmf = binomial_numerators(n, mk, &d);
            let mut upper = pmf.clone();
            for j in (0..n as usize).rev() {
                upper[j] = &upper[j] + &upper[j + 1];
            }
            (pmf, upper)
        })
        .collect();
    let mut total = BigRational::zero();
    for k in 0..n as usize {
        let pi = if k == 0 {
            tables[0].0[0].clone()
        } else {
            let (hi, lo) = (&tables[k - 1], &tables[k]);
            &hi.1[k] - &lo.1[k] + &lo.0[k]
        };
        total += BigRational::from_integer(pi) * rational::win_prob_d(k as u64 + 1, n).unwrap();
    }
    total / BigRational::from_integer(d.pow(n as u32))
}

/// Central difference of `w_n` in `a_k` with step `2^-bits`, exact.
pub fn central_difference_dyadic(m: &[BigInt], bits: u32, n: u64, k: usize) -> f64 {
    let mut up = m.to_vec();
    let mut down = m.to_vec();
    up[k - 1] += 1;
    down[k - 1] -= 1;
    let diff = win_prob_dyadic(&up, bits, n) - win_prob_dyadic(&down, bits, n);
    let step = BigRational::new(BigInt::from(2), BigInt::one() << bits);
    (diff / step).to_f64().unwrap()
}

/// Random nonincreasing dyadic cutoffs with `coarse_bits` of resolution,
/// scaled to `fine_bits`. Neighbours differ by more than `min_gap`.
pub fn random_dyadic_cutoffs<R: Rng>(
    rng: &mut R,
    len: usize,
    coarse_bits: u32,
    fine_bits: u32,
    min_gap: f64,
) -> (Vec<BigInt>, Vec<f64>) {
    let scale = 1u64 << coarse_bits;
    loop {
        let mut coarse: Vec<u64> = (0..len).map(|_| rng.random_range(1..scale)).collect();
        coarse.sort_unstable_by(|a, b| b.cmp(a));
        let values: Vec<f64> = coarse.iter().map(|&c| c as f64 / scale as f64).collect();
        if values.windows(2).all(|w| w[0] - w[1] > min_gap) {
            let fine = coarse.iter().map(|&c| BigInt::from(c) << (fine_bits - coarse_bits)).collect();
            return (fine, values);
        }
    }
}

/// A random finite prior with up to `max_points` support points in `1..=max_n`.
pub fn random_finite_prior<R: Rng>(rng: &mut R, max_points: usize, max_n: u64) -> Vec<(u64, f64)> {
    let points = rng.random_range(1..=max_points);
    let mut ns: Vec<u64> = (0..points).map(|_| rng.random_range(1..=max_n)).collect();
    ns.sort_unstable();
    ns.dedup();
    let raw: Vec<f64> = ns.iter().map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    ns.into_iter().zip(raw).map(|(n, w)| (n, w / total)).collect()
}
