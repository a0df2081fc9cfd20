use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{is_prime_u64, sieve_primes};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleTuple {
    h: Vec<i64>,
}

impl AdmissibleTuple {
    /// Validates that the shifts are strictly increasing and admissible.
    pub fn new(h: Vec<i64>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::InvalidParameter("empty tuple".into()));
        }
        if h.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!("shifts not strictly increasing: {h:?}")));
        }
        if !is_admissible(&h) {
            return Err(Error::InvalidParameter(format!("tuple {h:?} is not admissible")));
        }
        Ok(AdmissibleTuple { h })
    }

    pub fn r(&self) -> usize {
        self.h.len()
    }

    pub fn shifts(&self) -> &[i64] {
        &self.h
    }

    pub fn contains(&self, h: i64) -> bool {
        self.h.binary_search(&h).is_ok()
    }

    /// Every shift lies in `[0, 2r²]`.
    pub fn within_two_r_squared(&self) -> bool {
        let top = 2 * (self.r() as i64).pow(2);
        self.h.iter().all(|&h| (0..=top).contains(&h))
    }
}

/// The first `r` primes larger than `r`.
pub fn first_primes_tuple(r: usize) -> AdmissibleTuple {
    assert!(r >= 1, "first_primes_tuple: r must be ≥ 1");
    let mut h = Vec::with_capacity(r);
    let mut n = r as u64 + 1;
    while h.len() < r {
        if is_prime_u64(n) {
            h.push(n as i64);
        }
        n += 1;
    }
    AdmissibleTuple::new(h).expect("primes above r form an admissible tuple")
}

/// True if, for every prime `p ≤ len(h)`, the shifts miss a class mod `p`.
///
/// Larger primes cannot be covered by `len(h)` shifts. Repeated shifts make
/// the tuple inadmissible.
pub fn is_admissible(h: &[i64]) -> bool {
    let mut sorted = h.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    sieve_primes(h.len() as u64).iter().all(|p| {
        let mut seen = vec![false; p as usize];
        for &v in h {
            seen[v.rem_euclid(p as i64) as usize] = true;
        }
        seen.contains(&false)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_tuples() {
        assert_eq!(first_primes_tuple(1).shifts(), &[2]);
        assert_eq!(first_primes_tuple(2).shifts(), &[3, 5]);
        assert_eq!(first_primes_tuple(3).shifts(), &[5, 7, 11]);
        assert_eq!(first_primes_tuple(4).shifts(), &[5, 7, 11, 13]);
    }

    #[test]
    fn admissibility_examples() {
        assert!(!is_admissible(&[0, 2, 4]));
        assert!(is_admissible(&[0, 2]));
        assert!(is_admissible(&[1, 9, 25, 49]));
        assert!(!is_admissible(&[0, 1]));
        assert!(!is_admissible(&[3, 3]));
        // residues mod 3 of (5, 7, 11) are 2, 1, 2: class 0 is missed
        assert!(is_admissible(&[5, 7, 11]));
    }

    #[test]
    fn first_primes_tuples_are_admissible_to_100() {
        for r in 1..=100 {
            let t = first_primes_tuple(r);
            assert_eq!(t.r(), r);
            assert!(is_admissible(t.shifts()));
        }
        // the [0, 2r²] window holds from small r on
        assert!((2..=100).all(|r| first_primes_tuple(r).within_two_r_squared()));
    }

    #[test]
    fn odd_squares_are_admissible() {
        for r in 1..=30i64 {
            let h: Vec<i64> = (1..=r).map(|i| (2 * i - 1).pow(2)).collect();
            assert!(AdmissibleTuple::new(h).is_ok(), "r = {r}");
        }
    }
}
