use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{is_prime, BigNat, PrimalityPolicy};
use crate::seed::substream;
use crate::sieve::SievedSet;

use super::frame::MaierFrame;

/// Pairs tracked by [`sample_rows`].
const MAX_PAIRS: usize = 64;

/// Offsets `a ∈ T` with `zP + m + a` prime, ascending.
pub fn row_primes(frame: &MaierFrame, t: &SievedSet, z: &BigUint, policy: PrimalityPolicy) -> Vec<u64> {
    t.iter()
        .filter(|&a| is_prime(&BigNat::new(frame.row_value(z, a)), policy).is_prime())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairHit {
    pub a: u64,
    pub b: u64,
    pub hits: u64,
    /// `hits(a)·hits(b)/trials`, the count expected under independence.
    pub independent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowStats {
    pub trials: u64,
    pub survivors: u64,
    /// `N(z)` for each trial, in trial order.
    pub counts: Vec<u64>,
    pub mean: f64,
    pub variance: f64,
    /// `(a, #{trials with zP + m + a prime})` for every `a ∈ T`.
    pub hits: Vec<(u64, u64)>,
    /// Mean singleton hit rate over `T`.
    pub singleton_rate: f64,
    /// Adjacent survivor pairs.
    pub pairs: Vec<PairHit>,
}

impl RowStats {
    pub fn hit_rate(&self, a: u64) -> Option<f64> {
        self.hits
            .iter()
            .find(|e| e.0 == a)
            .map(|e| e.1 as f64 / self.trials as f64)
    }
}

/// Samples `trials` rows `z ∈ [1, Z]`, one substream per trial, and counts
/// primes among the translated survivors.
pub fn sample_rows(
    frame: &MaierFrame,
    t: &SievedSet,
    trials: u64,
    seed: u64,
    policy: PrimalityPolicy,
) -> Result<RowStats> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be ≥ 1".into()));
    }
    let members = t.to_vec();
    let rows: Vec<Vec<u64>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let z = frame.sample_z(&mut substream(seed, "maier/rows", k));
            row_primes(frame, t, &z, policy)
        })
        .collect();
    let mut hits: Vec<(u64, u64)> = members.iter().map(|&a| (a, 0)).collect();
    let pairs_idx: Vec<(usize, usize)> = (1..members.len()).map(|i| (i - 1, i)).take(MAX_PAIRS).collect();
    let mut pair_hits = vec![0u64; pairs_idx.len()];
    let mut flags = vec![false; members.len()];
    for row in &rows {
        flags.iter_mut().for_each(|f| *f = false);
        for a in row {
            let i = members.binary_search(a).expect("row primes lie in T");
            flags[i] = true;
            hits[i].1 += 1;
        }
        for (h, &(i, j)) in pair_hits.iter_mut().zip(&pairs_idx) {
            *h += u64::from(flags[i] && flags[j]);
        }
    }
    let counts: Vec<u64> = rows.iter().map(|r| r.len() as u64).collect();
    let n = trials as f64;
    let mean = counts.iter().sum::<u64>() as f64 / n;
    let variance = if trials > 1 {
        counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let pairs = pairs_idx
        .iter()
        .zip(&pair_hits)
        .map(|(&(i, j), &h)| PairHit {
            a: members[i],
            b: members[j],
            hits: h,
            independent: hits[i].1 as f64 * hits[j].1 as f64 / n,
        })
        .collect();
    let singleton_rate = if members.is_empty() { 0.0 } else { mean / members.len() as f64 };
    Ok(RowStats {
        trials,
        survivors: members.len() as u64,
        counts,
        mean,
        variance,
        hits,
        singleton_rate,
        pairs,
    })
}
