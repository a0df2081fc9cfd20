//! Parameters `y, z, u, r, σ` derived from `x`, and the disjoint prime sets
//! `S ⊆ (small_low, small_high]`, `P ⊆ (x/2, x]`, `Q ⊆ (x, y]`.
//!
//! At any feasible `x` the formula window `(log^20 x, z]` for `S` is empty,
//! so every derived field can be overridden ("toy mode"). Each field records
//! whether it came from a formula, an override or a plain default.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{is_prime_u64, log_iterates, mertens_density, sieve_primes};

pub const DEFAULT_C: f64 = 0.1;
pub const DEFAULT_A: f64 = 4.0;
/// Exponent in `r = ⌊log^{c0} x⌋`; an engineering choice.
pub const DEFAULT_C0: f64 = 0.5;

/// Largest bound the partition is willing to sieve up to.
const MAX_SIEVE: f64 = 2e9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Formula,
    Override,
    Default,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamOverrides {
    pub y: Option<f64>,
    pub z: Option<f64>,
    pub r: Option<u32>,
    pub epsilon: Option<f64>,
    pub small_low: Option<f64>,
    pub small_high: Option<f64>,
    pub c0: Option<f64>,
}

impl ParamOverrides {
    pub fn is_empty(&self) -> bool {
        self == &ParamOverrides::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub x: f64,
    pub c: f64,
    pub a: f64,
    pub c0: f64,
    pub y: f64,
    pub z: f64,
    /// `log y / log z`.
    pub u: f64,
    pub r: u32,
    pub epsilon: f64,
    pub small_low: f64,
    pub small_high: f64,
    /// Mertens product over the primes of `(small_low, small_high]`.
    pub sigma: f64,
    /// Nominal `(u_w/σ)·(x/2y)` with the weight scale `u_w = max(log r, 1)`.
    pub c_target: f64,
    pub provenance: BTreeMap<String, Source>,
}

/// Nominal weight scale standing in for `u(r) ≍ log r`.
pub fn nominal_weight_u(r: u32) -> f64 {
    f64::from(r).ln().max(1.0)
}

pub fn derive_parameters(x: f64, c: f64, a: f64, overrides: &ParamOverrides) -> Result<Params> {
    if !(x.is_finite() && x >= 10.0) {
        return Err(Error::InvalidParameter(format!("x must be ≥ 10, got {x}")));
    }
    if !(c > 0.0 && c < 0.5) {
        return Err(Error::InvalidParameter(format!("c must lie in (0, 1/2), got {c}")));
    }
    if !(a >= 1.0) {
        return Err(Error::InvalidParameter(format!("A must be ≥ 1, got {a}")));
    }
    let mut provenance = BTreeMap::new();
    let mut pick = |name: &str, over: Option<f64>, source: Source, f: &dyn Fn() -> Result<f64>| {
        let (v, s) = match over {
            Some(v) => (Ok(v), Source::Override),
            None => (f(), source),
        };
        provenance.insert(name.to_string(), s);
        v
    };
    let lx = x.ln();
    let y = pick("y", overrides.y, Source::Formula, &|| {
        let l = log_iterates(x, false)?;
        Ok(c * x * l.log1 * l.log3 / l.log2)
    })?;
    let z = pick("z", overrides.z, Source::Formula, &|| {
        let l = log_iterates(x, false)?;
        Ok(x.powf(l.log3 / (4.0 * l.log2)))
    })?;
    let c0 = pick("c0", overrides.c0, Source::Default, &|| Ok(DEFAULT_C0))?;
    let r = pick("r", overrides.r.map(f64::from), Source::Formula, &|| {
        Ok(lx.powf(c0).floor().max(1.0))
    })? as u32;
    let epsilon = pick("epsilon", overrides.epsilon, Source::Default, &|| {
        Ok((1.0 / (4.0 * a * a)).min(0.5))
    })?;
    let small_low = pick("small_low", overrides.small_low, Source::Formula, &|| Ok(lx.powi(20)))?;
    let small_high = pick("small_high", overrides.small_high, Source::Formula, &|| Ok(z))?;

    if !(y > x) {
        return Err(Error::InvalidParameter(format!("y = {y} must exceed x = {x}")));
    }
    if !(z > 1.0) {
        return Err(Error::InvalidParameter(format!("z = {z} must exceed 1")));
    }
    if r == 0 {
        return Err(Error::InvalidParameter("r must be ≥ 1".into()));
    }
    if !(epsilon > 0.0 && epsilon < 0.5 + f64::EPSILON) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1/2], got {epsilon}")));
    }
    let u = y.ln() / z.ln();
    let sigma = mertens_density(&small_primes(small_low, small_high, 1)?).value;
    let c_target = nominal_weight_u(r) / sigma * x / (2.0 * y);
    Ok(Params {
        x,
        c,
        a,
        c0,
        y,
        z,
        u,
        r,
        epsilon,
        small_low,
        small_high,
        sigma,
        c_target,
        provenance,
    })
}

fn small_primes(low: f64, high: f64, b0: u64) -> Result<Vec<u64>> {
    if !(low < high) || high < 2.0 {
        return Ok(Vec::new());
    }
    if high > MAX_SIEVE {
        return Err(Error::InvalidParameter(format!(
            "small-prime window upper end {high} is beyond the sieve budget"
        )));
    }
    let list = sieve_primes(high.floor() as u64);
    Ok(list
        .iter()
        .filter(|&s| (s as f64) > low && s != b0)
        .collect())
}

/// The three disjoint prime sets with their defining parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimePartition {
    pub x: u64,
    pub y: u64,
    pub b0: u64,
    pub small_low: f64,
    /// `z`, the top of the small-prime window (floored).
    pub small_high: u64,
    pub s: Vec<u64>,
    pub p: Vec<u64>,
    pub q: Vec<u64>,
    pub warnings: Vec<String>,
}

impl PrimePartition {
    /// `σ = ∏_{s ∈ S} (1 − 1/s)`.
    pub fn sigma(&self) -> f64 {
        mertens_density(&self.s).value
    }

    /// Checks range membership, disjointness and the `B0` exclusion.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("partition: {what}")));
        let x = self.x;
        if self.s.iter().any(|&s| (s as f64) <= self.small_low || s > self.small_high) {
            return bad("S outside its window");
        }
        if self.p.iter().any(|&p| 2 * p <= x || p > x) {
            return bad("P outside (x/2, x]");
        }
        if self.q.iter().any(|&q| q <= x || q > self.y) {
            return bad("Q outside (x, y]");
        }
        if self.b0 > 1
            && (self.s.contains(&self.b0) || self.p.contains(&self.b0) || self.q.contains(&self.b0))
        {
            return bad("B0 present");
        }
        if self.s.iter().any(|&s| 2 * s > x) {
            return bad("S meets P");
        }
        for set in [&self.s, &self.p, &self.q] {
            if set.windows(2).any(|w| w[0] >= w[1]) {
                return bad("set not strictly ascending");
            }
        }
        Ok(())
    }

    /// Primes `≤ x`, excluding `B0`.
    pub fn primes_to_x(&self) -> Vec<u64> {
        sieve_primes(self.x).iter().filter(|&p| p != self.b0).collect()
    }
}

pub fn build_partition(params: &Params, b0: u64) -> Result<PrimePartition> {
    if b0 != 1 && !is_prime_u64(b0) {
        return Err(Error::InvalidParameter(format!("B0 must be 1 or prime, got {b0}")));
    }
    if params.y > MAX_SIEVE {
        return Err(Error::InvalidParameter(format!("y = {} is beyond the sieve budget", params.y)));
    }
    let x = params.x.floor() as u64;
    let y = params.y.floor() as u64;
    let mut warnings = Vec::new();
    if params.small_high > x as f64 / 2.0 {
        return Err(Error::InvalidParameter(format!(
            "small-prime window top {} exceeds x/2",
            params.small_high
        )));
    }
    let s = small_primes(params.small_low, params.small_high, b0)?;
    if s.is_empty() {
        warnings.push(format!(
            "S is empty: window ({}, {}] holds no usable primes",
            params.small_low, params.small_high
        ));
    }
    let all = sieve_primes(y);
    let p: Vec<u64> = all.in_range(x / 2, x).iter().copied().filter(|&p| p != b0).collect();
    let q: Vec<u64> = all.in_range(x, y).iter().copied().filter(|&q| q != b0).collect();
    if q.is_empty() {
        return Err(Error::EmptyPrimeSet("Q"));
    }
    let partition = PrimePartition {
        x,
        y,
        b0,
        small_low: params.small_low,
        small_high: params.small_high.floor().max(0.0) as u64,
        s,
        p,
        q,
        warnings,
    };
    partition.validate()?;
    Ok(partition)
}
