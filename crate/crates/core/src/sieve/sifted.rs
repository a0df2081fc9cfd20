//! Bit-set survivor sets over `(lo, hi]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::residue::ResidueSystem;
use crate::error::{Error, Result};

/// Words per parallel chunk (2^20 integers).
const CHUNK_WORDS: usize = 1 << 14;

/// Members of `(lo, hi]`; bit `i` stands for `lo + 1 + i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SievedSet {
    lo: u64,
    hi: u64,
    words: Vec<u64>,
    count: u64,
}

impl SievedSet {
    /// All of `(lo, hi]`.
    pub fn full(lo: u64, hi: u64) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidParameter(format!("empty interval ({lo}, {hi}]")));
        }
        let len = (hi - lo) as usize;
        let mut words = vec![u64::MAX; len.div_ceil(64)];
        if !len.is_multiple_of(64) {
            *words.last_mut().unwrap() = (1u64 << (len % 64)) - 1;
        }
        Ok(SievedSet { lo, hi, words, count: len as u64 })
    }

    pub fn from_members(lo: u64, hi: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut set = SievedSet::full(lo, hi)?;
        set.words.iter_mut().for_each(|w| *w = 0);
        set.count = 0;
        for n in members {
            if n <= lo || n > hi {
                return Err(Error::InvalidParameter(format!("{n} outside ({lo}, {hi}]")));
            }
            let i = (n - lo - 1) as usize;
            if set.words[i / 64] & (1 << (i % 64)) == 0 {
                set.words[i / 64] |= 1 << (i % 64);
                set.count += 1;
            }
        }
        Ok(set)
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Cardinality, maintained across mutations.
    pub fn len(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn contains(&self, n: u64) -> bool {
        if n <= self.lo || n > self.hi {
            return false;
        }
        let i = (n - self.lo - 1) as usize;
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    /// Removes `n`; returns whether it was present.
    pub fn remove(&mut self, n: u64) -> bool {
        if !self.contains(n) {
            return false;
        }
        let i = (n - self.lo - 1) as usize;
        self.words[i / 64] &= !(1 << (i % 64));
        self.count -= 1;
        true
    }

    /// Popcount from scratch.
    pub fn recount(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let lo = self.lo;
        self.words.iter().enumerate().flat_map(move |(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as u64;
                bits &= bits - 1;
                Some(lo + 1 + w as u64 * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    /// Members in the closed range `[a, b]`.
    pub fn count_in(&self, a: u64, b: u64) -> u64 {
        self.iter().filter(|&n| n >= a && n <= b).count() as u64
    }

    /// Maximal runs of consecutive members as `(start, length)`.
    pub fn run_lengths(&self) -> Vec<(u64, u64)> {
        let mut runs: Vec<(u64, u64)> = Vec::new();
        for n in self.iter() {
            match runs.last_mut() {
                Some((start, len)) if *start + *len == n => *len += 1,
                _ => runs.push((n, 1)),
            }
        }
        runs
    }

    pub fn from_run_lengths(lo: u64, hi: u64, runs: &[(u64, u64)]) -> Result<Self> {
        SievedSet::from_members(lo, hi, runs.iter().flat_map(|&(s, l)| s..s + l))
    }

    pub fn to_export(&self) -> SievedSetExport {
        SievedSetExport { lo: self.lo, hi: self.hi, count: self.count, runs: self.run_lengths() }
    }
}

/// Run-length form used in report files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SievedSetExport {
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
    pub runs: Vec<(u64, u64)>,
}

/// `{n ∈ (lo, hi] : n ≢ a_p (mod p) for every p in the system}`.
///
/// The interval is cut into fixed chunks sifted in parallel; the result does
/// not depend on the thread count.
pub fn sift_interval(lo: u64, hi: u64, system: &ResidueSystem) -> Result<SievedSet> {
    let mut set = SievedSet::full(lo, hi)?;
    let classes: Vec<(u64, u64)> = system.iter().collect();
    let len = hi - lo;
    set.words
        .par_chunks_mut(CHUNK_WORDS)
        .enumerate()
        .for_each(|(ci, chunk)| {
            let first_bit = (ci * CHUNK_WORDS * 64) as u64;
            let base = lo + 1 + first_bit;
            let nbits = (chunk.len() as u64 * 64).min(len - first_bit);
            for &(p, a) in &classes {
                let mut i = (a + p - base % p) % p;
                while i < nbits {
                    chunk[(i / 64) as usize] &= !(1u64 << (i % 64));
                    i += p;
                }
            }
        });
    set.count = set.recount();
    Ok(set)
}
