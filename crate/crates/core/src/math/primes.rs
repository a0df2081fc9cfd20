//! Segmented, bit-packed sieve of Eratosthenes over odd numbers.

use serde::{Deserialize, Serialize};

/// Odd candidates per segment; one bit each.
const SEGMENT_BITS: usize = 1 << 18;

/// Exactly the primes `≤ limit`, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeList {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeList {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    /// Membership for `n ≤ limit`; `false` above the limit.
    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    /// `π(n)` for `n ≤ limit`.
    pub fn count_le(&self, n: u64) -> usize {
        self.primes.partition_point(|&p| p <= n)
    }

    /// Primes in the half-open interval `(lo, hi]`.
    pub fn in_range(&self, lo: u64, hi: u64) -> &[u64] {
        let a = self.primes.partition_point(|&p| p <= lo);
        let b = self.primes.partition_point(|&p| p <= hi);
        &self.primes[a..b.max(a)]
    }
}

pub fn sieve_primes(limit: u64) -> PrimeList {
    let mut primes = Vec::with_capacity(estimate_pi(limit));
    for_each_prime(0, limit, |p| primes.push(p));
    PrimeList { limit, primes }
}

fn estimate_pi(n: u64) -> usize {
    if n < 17 {
        return 6;
    }
    let nf = n as f64;
    (1.26 * nf / nf.ln()) as usize
}

/// Calls `f` on every prime in `[lo, hi]`, ascending.
pub fn for_each_prime(lo: u64, hi: u64, mut f: impl FnMut(u64)) {
    if hi < 2 || lo > hi {
        return;
    }
    if lo <= 2 {
        f(2);
    }
    if hi < 3 {
        return;
    }
    let base = base_primes(hi.isqrt());
    let mut words = vec![0u64; SEGMENT_BITS / 64];
    let mut seg_lo = lo.max(3) | 1;
    while seg_lo <= hi {
        let last = hi.min(seg_lo + 2 * (SEGMENT_BITS as u64 - 1));
        let count = ((last - seg_lo) / 2 + 1) as usize;
        let used = count.div_ceil(64);
        words[..used].fill(u64::MAX);
        if !count.is_multiple_of(64) {
            words[used - 1] = (1u64 << (count % 64)) - 1;
        }
        for &p in base.iter().skip(1) {
            let sq = p * p;
            if sq > last {
                break;
            }
            let mut start = sq.max(seg_lo.div_ceil(p) * p);
            if start % 2 == 0 {
                start += p;
            }
            let mut i = ((start - seg_lo) / 2) as usize;
            while i < count {
                words[i / 64] &= !(1u64 << (i % 64));
                i += p as usize;
            }
        }
        for (w, &word) in words[..used].iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                f(seg_lo + 2 * (w * 64 + b) as u64);
                bits &= bits - 1;
            }
        }
        match last.checked_add(2) {
            Some(next) => seg_lo = next,
            None => break,
        }
    }
}

/// Primes `≤ n` by a plain byte sieve; `n` is at most a square root here.
fn base_primes(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn small_cases() {
        assert_eq!(sieve_primes(10).as_slice(), &[2, 3, 5, 7]);
        assert!(sieve_primes(1).is_empty());
        assert!(sieve_primes(0).is_empty());
        assert_eq!(sieve_primes(2).as_slice(), &[2]);
        assert_eq!(sieve_primes(3).as_slice(), &[2, 3]);
    }

    #[test]
    fn agrees_with_trial_division_to_1e5() {
        let list = sieve_primes(100_000);
        let expected: Vec<u64> = (0..=100_000).filter(|&n| trial_division(n)).collect();
        assert_eq!(list.as_slice(), expected.as_slice());
    }

    #[test]
    fn pi_of_a_million() {
        assert_eq!(sieve_primes(1_000_000).len(), 78_498);
    }

    #[test]
    fn segments_join_cleanly() {
        // several segments, and windows that start mid-segment
        let all = sieve_primes(3_000_000);
        let mut got = Vec::new();
        for_each_prime(1_234_567, 2_987_654, |p| got.push(p));
        let expected: Vec<u64> = all
            .iter()
            .filter(|&p| (1_234_567..=2_987_654).contains(&p))
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn range_queries() {
        let list = sieve_primes(100);
        assert_eq!(list.in_range(50, 100).len(), 10);
        assert_eq!(list.in_range(10, 10).len(), 0);
        assert_eq!(list.count_le(100), 25);
        assert!(list.contains(97) && !list.contains(91));
    }
}
