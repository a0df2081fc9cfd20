//! Exact arithmetic primitives.

mod analytic;
mod bignat;
mod crt;
mod primality;
mod primes;
mod sum;

pub use analytic::{
    is_smooth, log_iterates, mertens_density, smooth_count, LogIterates, MertensDensity,
    SmoothCount,
};
pub use bignat::{random_below, BigNat};
pub use crt::{crt_combine, crt_combine_u64};
pub use primality::{
    check_composite_witness, is_prime, is_prime_u64, miller_rabin_big, CompositeWitness,
    Primality, PrimalityPolicy, DEFAULT_ROUNDS, DETERMINISTIC_LIMIT,
};
pub use primes::{for_each_prime, sieve_primes, PrimeList};
pub use sum::NeumaierSum;
