//! Prime sieving, primality, CRT and smooth-number counts.

use gapchain::math::{
    crt_combine_u64, is_prime, is_prime_u64, mertens_density, sieve_primes, smooth_count, BigNat,
    PrimalityPolicy,
};

fn main() -> gapchain::Result<()> {
    let primes = sieve_primes(1_000_000);
    println!("pi(10^6) = {}", primes.len());
    println!("last prime below 10^6: {:?}", primes.as_slice().last());
    println!("2^61 - 1 prime: {}", is_prime_u64((1 << 61) - 1));

    let mersenne: BigNat = "170141183460469231731687303715884105727".parse()?;
    let verdict = is_prime(&mersenne, PrimalityPolicy::default());
    println!("2^127 - 1: {verdict:?}");

    // m ≡ −a_p (mod p) for a = (1, 2, 3, 4) over p = 2, 3, 5, 7
    let (m, modulus) = crt_combine_u64(&[(1, 2), (1, 3), (2, 5), (3, 7)])?;
    println!("m = {m} mod {modulus}");

    let psi = smooth_count(100, 5)?;
    println!("Psi(100, 5) = {} (estimate {:.1}, u = {:.3})", psi.exact, psi.estimate, psi.u);

    let sigma = mertens_density(&[2, 3, 5, 7]);
    println!("prod (1 - 1/p) over p <= 7 = {} = {:.6}", sigma.exact, sigma.value);
    Ok(())
}
