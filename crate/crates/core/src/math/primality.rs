//! Miller–Rabin primality with checkable composite witnesses.
//!
//! Below [`DETERMINISTIC_LIMIT`] (2^64) the verdict is exact: the first twelve
//! primes as bases are a complete witness set for every 64-bit integer. Above
//! it, bases are drawn from a ChaCha stream keyed by the candidate itself, so
//! a verdict is reproducible and the error is at most `4^-rounds`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bignat::{random_below, BigNat};
use crate::seed::fnv1a;

pub const DETERMINISTIC_LIMIT: u128 = 1 << 64;

pub const DEFAULT_ROUNDS: u32 = 40;

const U64_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

const TRIAL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[derive(Default)]
pub enum PrimalityPolicy {
    /// Exact below the threshold; [`DEFAULT_ROUNDS`] random bases above it.
    #[default]
    DeterministicBelowThreshold,
    Probabilistic { rounds: u32 },
}

impl PrimalityPolicy {
    pub fn rounds(&self) -> u32 {
        match *self {
            PrimalityPolicy::DeterministicBelowThreshold => DEFAULT_ROUNDS,
            PrimalityPolicy::Probabilistic { rounds } => rounds,
        }
    }

    /// Error bound of a single "probably prime" verdict above the threshold.
    pub fn error_bound(&self) -> f64 {
        4f64.powi(-(self.rounds() as i32))
    }
}


#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum CompositeWitness {
    /// 0 and 1 are not prime by convention.
    Unit,
    /// A nontrivial divisor.
    Factor(BigNat),
    /// A base for which the Miller–Rabin round fails.
    MillerRabinBase(BigNat),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Primality {
    Prime,
    Composite(CompositeWitness),
    ProbablyPrime { rounds: u32, error_bound: f64 },
}

impl Primality {
    /// True for `Prime` and `ProbablyPrime`.
    pub fn is_prime(&self) -> bool {
        !matches!(self, Primality::Composite(_))
    }
}

pub fn is_prime(n: &BigNat, policy: PrimalityPolicy) -> Primality {
    let n = n.as_biguint();
    if let Some(small) = n.to_u64() {
        return is_prime_small(small);
    }
    for &p in &TRIAL_PRIMES {
        if (n % p).is_zero() {
            return Primality::Composite(CompositeWitness::Factor(BigNat::from(u64::from(p))));
        }
    }
    let rounds = policy.rounds();
    let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(&n.to_bytes_le()));
    let three = BigUint::from(3u32);
    let span = n - &three;
    for _ in 0..rounds {
        let base = random_below(&mut rng, &span) + 2u32;
        if !miller_rabin_big(n, &base) {
            return Primality::Composite(CompositeWitness::MillerRabinBase(BigNat::new(base)));
        }
    }
    Primality::ProbablyPrime {
        rounds,
        error_bound: policy.error_bound(),
    }
}

fn is_prime_small(n: u64) -> Primality {
    if n < 2 {
        return Primality::Composite(CompositeWitness::Unit);
    }
    for &p in &TRIAL_PRIMES {
        let p = u64::from(p);
        if n == p {
            return Primality::Prime;
        }
        if n.is_multiple_of(p) {
            return Primality::Composite(CompositeWitness::Factor(BigNat::from(p)));
        }
    }
    for &a in &U64_BASES {
        if !miller_rabin_u64(n, a) {
            return Primality::Composite(CompositeWitness::MillerRabinBase(BigNat::from(a)));
        }
    }
    Primality::Prime
}

pub fn is_prime_u64(n: u64) -> bool {
    is_prime_small(n).is_prime()
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// One strong-probable-prime round for odd `n > 2`; `false` proves `n` composite.
fn miller_rabin_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// One strong-probable-prime round for odd `n > 3`; `false` proves `n` composite.
pub fn miller_rabin_big(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let a = base % n;
    if a.is_zero() {
        return true;
    }
    let mut x = a.modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Re-checks a composite witness against `n`.
pub fn check_composite_witness(n: &BigNat, witness: &CompositeWitness) -> bool {
    let n = n.as_biguint();
    match witness {
        CompositeWitness::Unit => n < &BigUint::from(2u32),
        CompositeWitness::Factor(f) => {
            let f = f.as_biguint();
            f > &BigUint::one() && f < n && n.is_multiple_of(f)
        }
        CompositeWitness::MillerRabinBase(b) => {
            let b = b.as_biguint();
            n > &BigUint::from(3u32)
                && n.is_odd()
                && b > &BigUint::one()
                && b < &(n - 1u32)
                && !miller_rabin_big(n, b)
        }
    }
}
