use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::bignat::BigNat;
use crate::error::{Error, Result};

/// Combines pairwise-coprime congruences `offset ≡ residue (mod modulus)`.
///
/// Returns `(offset, M)` with `M = ∏ moduli` and `offset ∈ [0, M)`. Residues
/// need not be reduced. An empty input yields `(0, 1)`.
pub fn crt_combine(congruences: &[(BigNat, BigNat)]) -> Result<(BigNat, BigNat)> {
    let mut offset = BigUint::zero();
    let mut modulus = BigUint::one();
    for (i, (residue, n)) in congruences.iter().enumerate() {
        let n = n.as_biguint();
        if n.is_zero() {
            return Err(Error::InvalidParameter("modulus 0 in congruence".into()));
        }
        if !modulus.gcd(n).is_one() {
            let other = congruences[..i]
                .iter()
                .map(|(_, m)| m)
                .find(|m| !m.as_biguint().gcd(n).is_one())
                .cloned()
                .unwrap_or_else(|| BigNat::new(modulus.clone()));
            return Err(Error::NonCoprimeModuli(other, BigNat::new(n.clone())));
        }
        let a = residue.as_biguint() % n;
        let cur = &offset % n;
        // solve offset + modulus·t ≡ a (mod n)
        let diff = (BigInt::from(a) - BigInt::from(cur)).mod_floor(&BigInt::from(n.clone()));
        let inv = mod_inverse(&(&modulus % n), n);
        let t = (diff * BigInt::from(inv)).mod_floor(&BigInt::from(n.clone()));
        let t = t.to_biguint().expect("reduced mod n");
        offset += &modulus * t;
        modulus *= n;
    }
    Ok((BigNat::new(offset), BigNat::new(modulus)))
}

/// [`crt_combine`] for machine-word residues and moduli.
pub fn crt_combine_u64(congruences: &[(u64, u64)]) -> Result<(BigNat, BigNat)> {
    let big: Vec<(BigNat, BigNat)> = congruences
        .iter()
        .map(|&(a, n)| (BigNat::from(a), BigNat::from(n)))
        .collect();
    crt_combine(&big)
}

fn mod_inverse(a: &BigUint, n: &BigUint) -> BigUint {
    if n.is_one() {
        return BigUint::zero();
    }
    let e = BigInt::from(a.clone()).extended_gcd(&BigInt::from(n.clone()));
    debug_assert!(e.gcd.is_one());
    let nn = BigInt::from(n.clone());
    let x = e.x.mod_floor(&nn);
    debug_assert!(!x.is_negative());
    x.to_biguint().expect("non-negative")
}
