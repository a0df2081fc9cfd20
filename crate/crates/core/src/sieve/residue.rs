use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::is_prime_u64;

/// One forbidden class `a_p mod p` per sieving prime, with `B0` excluded.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSystem {
    entries: BTreeMap<u64, u64>,
    excluded: u64,
}

impl ResidueSystem {
    /// Empty system; `excluded` is `B0` (1 for none).
    pub fn new(excluded: u64) -> Self {
        ResidueSystem { entries: BTreeMap::new(), excluded }
    }

    /// Sets the class of `p` to `class mod p`, replacing any earlier class.
    pub fn insert(&mut self, p: u64, class: i64) -> Result<()> {
        if !is_prime_u64(p) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        if p == self.excluded {
            return Err(Error::InvalidParameter(format!("{p} is the excluded prime B0")));
        }
        self.entries.insert(p, reduce(class, p));
        Ok(())
    }

    pub fn class(&self, p: u64) -> Option<u64> {
        self.entries.get(&p).copied()
    }

    pub fn excluded(&self) -> u64 {
        self.excluded
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(p, a_p)` pairs in ascending `p`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.entries.iter().map(|(&p, &a)| (p, a))
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    /// True if `n` avoids every class.
    pub fn avoids(&self, n: i128) -> bool {
        self.entries
            .iter()
            .all(|(&p, &a)| n.rem_euclid(i128::from(p)) as u64 != a)
    }

    /// The first prime whose class contains `n`, if any.
    pub fn hit_by(&self, n: i128) -> Option<u64> {
        self.entries
            .iter()
            .find(|(&p, &a)| n.rem_euclid(i128::from(p)) as u64 == a)
            .map(|(&p, _)| p)
    }
}

fn reduce(class: i64, p: u64) -> u64 {
    i128::from(class).rem_euclid(i128::from(p)) as u64
}

/// The small-prime class vector `ā = (a_s mod s)_{s ∈ S}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallClassVector {
    classes: Vec<(u64, u64)>,
}

impl SmallClassVector {
    /// Pairs `(s, a_s)`; residues are reduced and primes must be distinct.
    pub fn new(mut pairs: Vec<(u64, i64)>) -> Result<Self> {
        pairs.sort_unstable_by_key(|&(s, _)| s);
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter(format!("prime {} listed twice", w[0].0)));
        }
        if let Some(&(s, _)) = pairs.iter().find(|&&(s, _)| !is_prime_u64(s)) {
            return Err(Error::InvalidParameter(format!("{s} is not prime")));
        }
        Ok(SmallClassVector {
            classes: pairs.into_iter().map(|(s, a)| (s, reduce(a, s))).collect(),
        })
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.classes.iter().map(|c| c.0)
    }

    pub fn classes(&self) -> &[(u64, u64)] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// `n ∈ S(ā)`: `n` avoids every class of `ā`.
pub fn sifted_membership(n: i128, abar: &SmallClassVector) -> bool {
    abar.classes
        .iter()
        .all(|&(s, a)| n.rem_euclid(i128::from(s)) as u64 != a)
}
