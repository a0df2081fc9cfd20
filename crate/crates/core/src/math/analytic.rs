//! Mertens products, iterated logarithms and smooth-number counts.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::primes::sieve_primes;
use crate::error::{Error, Result};

/// `∏ (1 − 1/s)` over a set of distinct primes.
#[derive(Clone, Debug, PartialEq)]
pub struct MertensDensity {
    pub exact: BigRational,
    pub value: f64,
}

pub fn mertens_density(primes: &[u64]) -> MertensDensity {
    let mut exact = BigRational::one();
    for &s in primes {
        exact *= BigRational::new(BigInt::from(s - 1), BigInt::from(s));
    }
    let value = exact
        .to_f64()
        .unwrap_or_else(|| primes.iter().map(|&s| 1.0 - 1.0 / s as f64).product());
    MertensDensity { exact, value }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogIterates {
    pub log1: f64,
    pub log2: f64,
    pub log3: f64,
    pub log4: Option<f64>,
}

/// Natural-log iterates of `x`. Every returned iterate must be positive.
pub fn log_iterates(x: f64, with_log4: bool) -> Result<LogIterates> {
    let step = |v: f64, iterate: &'static str| -> Result<f64> {
        let l = v.ln();
        if l.is_finite() && l > 0.0 {
            Ok(l)
        } else {
            Err(Error::Domain { iterate, x })
        }
    };
    let log1 = step(x, "log")?;
    let log2 = step(log1, "log_2")?;
    let log3 = step(log2, "log_3")?;
    let log4 = if with_log4 { Some(step(log3, "log_4")?) } else { None };
    Ok(LogIterates { log1, log2, log3, log4 })
}

/// `Ψ(y, z)` and the main-term estimate `y·e^{−u log u}`, `u = log y / log z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothCount {
    pub exact: u64,
    pub estimate: f64,
    pub u: f64,
}

/// Counts `n ≤ y` with every prime factor `≤ z`; 1 counts as smooth.
///
/// For `u ≤ 1` the estimate is `y` itself.
pub fn smooth_count(y: u64, z: u64) -> Result<SmoothCount> {
    if y < 1 || z < 2 {
        return Err(Error::InvalidParameter(format!(
            "smooth_count needs y ≥ 1 and z ≥ 2, got y = {y}, z = {z}"
        )));
    }
    let u = (y as f64).ln() / (z as f64).ln();
    let estimate = if u <= 1.0 {
        y as f64
    } else {
        y as f64 * (-u * u.ln()).exp()
    };
    let exact = if z >= y {
        y
    } else {
        let primes = sieve_primes(z);
        count_smooth(y, primes.as_slice(), 0)
    };
    Ok(SmoothCount { exact, estimate, u })
}

/// Numbers `≤ bound` whose prime factors all lie in `primes[start..]`.
fn count_smooth(bound: u64, primes: &[u64], start: usize) -> u64 {
    let mut total = 1;
    for i in start..primes.len() {
        let p = primes[i];
        if p > bound {
            break;
        }
        if p.saturating_mul(p) > bound {
            // the cofactor is below p, so only p itself remains
            total += primes[i..].partition_point(|&q| q <= bound) as u64;
            break;
        }
        total += count_smooth(bound / p, primes, i);
    }
    total
}

/// True if every prime factor of `n ≥ 1` is `≤ z`.
pub fn is_smooth(mut n: u64, z: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut d = 2u64;
    while d <= z && d.saturating_mul(d) <= n {
        while n.is_multiple_of(d) {
            n /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    n == 1 || n <= z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_smooth(y: u64, z: u64) -> u64 {
        (1..=y)
            .filter(|&n| {
                let mut m = n;
                for p in 2..=z.min(n) {
                    while m % p == 0 {
                        m /= p;
                    }
                }
                m == 1
            })
            .count() as u64
    }

    #[test]
    fn mertens_examples() {
        let d = mertens_density(&[3, 5, 7]);
        assert_eq!(d.exact, BigRational::new(16.into(), 35.into()));
        assert!((d.value - 16.0 / 35.0).abs() < 1e-15);
        assert_eq!(mertens_density(&[]).exact, BigRational::one());

        let primes: Vec<u64> = sieve_primes(100).in_range(10, 100).to_vec();
        assert_eq!(primes.len(), 21);
        let naive: f64 = primes.iter().map(|&s| (s - 1) as f64 / s as f64).product();
        let d = mertens_density(&primes);
        assert!((d.value - naive).abs() / naive < 1e-13);
    }

    #[test]
    fn mertens_is_multiplicative_on_disjoint_sets() {
        let a = [11u64, 13, 17];
        let b = [19u64, 23, 101, 103];
        let joint: Vec<u64> = a.iter().chain(&b).copied().collect();
        assert_eq!(
            mertens_density(&joint).exact,
            mertens_density(&a).exact * mertens_density(&b).exact
        );
    }

    #[test]
    fn log_iterates_at_ten_million() {
        let l = log_iterates(1e7, true).unwrap();
        assert!((l.log1 - 16.118_095_650_958_32).abs() < 1e-9);
        assert!((l.log2 - 2.779_942_594).abs() < 1e-8);
        assert!((l.log3 - 1.022_430_278).abs() < 1e-8);
        assert!(l.log4.unwrap() > 0.0);
    }

    #[test]
    fn log_iterates_boundary_and_monotonicity() {
        let e_e = std::f64::consts::E.powf(std::f64::consts::E);
        match log_iterates(e_e, false) {
            Err(Error::Domain { iterate, .. }) => assert_eq!(iterate, "log_3"),
            other => panic!("unexpected {other:?}"),
        }
        let mut prev = log_iterates(20.0, false).unwrap();
        for x in [50.0, 1e3, 1e5, 1e9, 1e30] {
            let cur = log_iterates(x, false).unwrap();
            assert!(cur.log1 >= prev.log1 && cur.log2 >= prev.log2 && cur.log3 >= prev.log3);
            prev = cur;
        }
    }

    #[test]
    fn smooth_examples() {
        assert_eq!(brute_smooth(100, 5), 34);
        assert_eq!(smooth_count(100, 5).unwrap().exact, 34);
        assert_eq!(smooth_count(30, 2).unwrap().exact, 5);
        assert_eq!(smooth_count(1000, 1000).unwrap().exact, 1000);
        assert_eq!(smooth_count(1, 2).unwrap().exact, 1);
        assert!(smooth_count(0, 2).is_err());
    }

    #[test]
    fn smooth_matches_brute_force_and_is_monotone() {
        for y in (1..400).step_by(7) {
            let mut prev = 0;
            for z in 2..40 {
                let e = smooth_count(y, z).unwrap().exact;
                assert_eq!(e, brute_smooth(y, z), "y={y} z={z}");
                assert!(e >= prev);
                prev = e;
            }
        }
        for z in [2, 3, 7, 13] {
            let mut prev = 0;
            for y in 1..300 {
                let e = smooth_count(y, z).unwrap().exact;
                assert!(e >= prev);
                prev = e;
            }
        }
    }

    #[test]
    fn is_smooth_cases() {
        assert!(is_smooth(1, 2));
        assert!(is_smooth(64, 2));
        assert!(!is_smooth(49, 5));
        assert!(is_smooth(49, 7));
        assert!(!is_smooth(2 * 101, 100));
    }
}
