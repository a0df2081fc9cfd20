use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};

use super::table::WeightTable;

/// Draws `ñ_p` with `P(ñ_p = n) = w(p, n) / Σ_m w(p, m)`.
#[derive(Clone, Debug)]
pub struct NTildeSampler {
    y: i64,
    primes: Vec<u64>,
    laws: Vec<Option<WeightedIndex<f64>>>,
}

impl NTildeSampler {
    pub fn new(table: &WeightTable) -> Self {
        let laws = table
            .rows()
            .iter()
            .map(|row| {
                if row.sum() > 0.0 {
                    WeightedIndex::new(row.values().iter().copied()).ok()
                } else {
                    None
                }
            })
            .collect();
        NTildeSampler { y: table.y(), primes: table.partition().p.clone(), laws }
    }

    pub fn sample<R: Rng + ?Sized>(&self, p: u64, rng: &mut R) -> Result<i64> {
        let k = self
            .primes
            .binary_search(&p)
            .map_err(|_| Error::InvalidParameter(format!("{p} is not in P")))?;
        match &self.laws[k] {
            Some(law) => Ok(law.sample(rng) as i64 - self.y),
            None => Err(Error::ZeroRow(p)),
        }
    }
}

/// One draw of `ñ_p`; builds the law on every call, so prefer
/// [`NTildeSampler`] for repeated draws.
pub fn sample_n_tilde<R: Rng + ?Sized>(table: &WeightTable, p: u64, rng: &mut R) -> Result<i64> {
    let row = table.live_row(p)?;
    let law = WeightedIndex::new(row.values().iter().copied()).map_err(|_| Error::ZeroRow(p))?;
    Ok(law.sample(rng) as i64 - table.y())
}
