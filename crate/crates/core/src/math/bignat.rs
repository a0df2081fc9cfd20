use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::RngCore;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Arbitrary-precision natural number, serialized as a decimal string.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigNat(BigUint);

impl BigNat {
    pub fn new(v: BigUint) -> Self {
        BigNat(v)
    }

    pub fn zero() -> Self {
        BigNat(BigUint::zero())
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn bits(&self) -> u64 {
        self.0.bits()
    }
}

impl From<u64> for BigNat {
    fn from(v: u64) -> Self {
        BigNat(BigUint::from(v))
    }
}

impl From<BigUint> for BigNat {
    fn from(v: BigUint) -> Self {
        BigNat(v)
    }
}

impl fmt::Display for BigNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for BigNat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::InvalidParameter(format!(
                "not a decimal natural number: {s:?}"
            )));
        }
        BigUint::from_str(s)
            .map(BigNat)
            .map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

impl Serialize for BigNat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_str_radix(10))
    }
}

impl<'de> Deserialize<'de> for BigNat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Uniform draw from `[0, bound)` by rejection on the bit length of `bound`.
///
/// Panics if `bound` is zero.
pub fn random_below<R: RngCore + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero(), "random_below: empty range");
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let spare = (bytes as u64 * 8 - bits) as u32;
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill_bytes(&mut buf);
        // big-endian: the leading byte carries the excess bits
        buf[0] &= 0xffu8 >> spare;
        let v = BigUint::from_bytes_be(&buf);
        if &v < bound {
            return v;
        }
    }
}
