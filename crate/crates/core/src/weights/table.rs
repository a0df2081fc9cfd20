use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{sieve_primes, NeumaierSum};
use crate::partition::PrimePartition;

use super::tuple::AdmissibleTuple;

pub const DEFAULT_THETA: f64 = 0.25;
/// Largest tuple length accepted by [`build_weights`].
pub const DEFAULT_R_CAP: usize = 64;
/// Largest number of stored weights (`#P · (2y + 1)`).
const MAX_ENTRIES: u64 = 1 << 27;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Uniform,
    Maynard,
    /// Rows supplied directly through [`WeightTable::from_values`].
    Custom,
}

impl std::str::FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(WeightKind::Uniform),
            "maynard" => Ok(WeightKind::Maynard),
            _ => Err(Error::InvalidParameter(format!("unknown weight kind {s:?}"))),
        }
    }
}

/// The weights `w(p, n)` for one `p`, densely over `n ∈ [−y, y]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightRow {
    p: u64,
    y: i64,
    values: Vec<f64>,
    sum: f64,
}

impl WeightRow {
    pub fn p(&self) -> u64 {
        self.p
    }

    /// `w(p, n)`; zero outside `[−y, y]`.
    pub fn get(&self, n: i64) -> f64 {
        if n < -self.y || n > self.y {
            return 0.0;
        }
        self.values[(n + self.y) as usize]
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    /// `P(ñ_p = n)`.
    pub fn prob(&self, n: i64) -> f64 {
        self.get(n) / self.sum
    }

    /// Nonzero entries `(n, w)` in ascending `n`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let y = self.y;
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(move |(k, &w)| (k as i64 - y, w))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support_size(&self) -> usize {
        self.values.iter().filter(|&&w| w != 0.0).count()
    }

    /// Compensated recomputation of the row sum.
    pub fn recompute_sum(&self) -> f64 {
        self.values.iter().copied().collect::<NeumaierSum>().value()
    }

    pub fn max_weight(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Nonnegative weights on `P × [−y, y]` with their row sums.
#[derive(Clone, Debug)]
pub struct WeightTable {
    partition: Arc<PrimePartition>,
    tuple: AdmissibleTuple,
    kind: WeightKind,
    theta: f64,
    level: f64,
    rows: Vec<WeightRow>,
}

impl WeightTable {
    pub fn partition(&self) -> &PrimePartition {
        &self.partition
    }

    pub fn partition_arc(&self) -> &Arc<PrimePartition> {
        &self.partition
    }

    pub fn tuple(&self) -> &AdmissibleTuple {
        &self.tuple
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `R = x^θ`.
    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn y(&self) -> i64 {
        self.partition.y as i64
    }

    pub fn rows(&self) -> &[WeightRow] {
        &self.rows
    }

    pub fn row(&self, p: u64) -> Option<&WeightRow> {
        self.partition
            .p
            .binary_search(&p)
            .ok()
            .map(|k| &self.rows[k])
    }

    /// Row for `p`, or [`Error::ZeroRow`] when it is absent or massless.
    pub fn live_row(&self, p: u64) -> Result<&WeightRow> {
        match self.row(p) {
            Some(row) if row.sum > 0.0 => Ok(row),
            Some(_) => Err(Error::ZeroRow(p)),
            None => Err(Error::InvalidParameter(format!("{p} is not in P"))),
        }
    }

    /// Table from explicit rows, one per `p ∈ P`, each over `[−y, y]`.
    pub fn from_values(
        partition: Arc<PrimePartition>,
        tuple: AdmissibleTuple,
        values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let y = partition.y as i64;
        if values.len() != partition.p.len() {
            return Err(Error::InvalidParameter(format!(
                "{} rows for {} primes in P",
                values.len(),
                partition.p.len()
            )));
        }
        let mut rows = Vec::with_capacity(values.len());
        for (&p, v) in partition.p.iter().zip(values) {
            if v.len() != (2 * y + 1) as usize {
                return Err(Error::InvalidParameter(format!("row for {p} does not span [-y, y]")));
            }
            if v.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
                return Err(Error::InvalidParameter(format!("row for {p} has a negative weight")));
            }
            let sum = v.iter().copied().collect::<NeumaierSum>().value();
            rows.push(WeightRow { p, y, values: v, sum });
        }
        Ok(WeightTable { partition, tuple, kind: WeightKind::Custom, theta: 0.0, level: 1.0, rows })
    }

    /// Largest relative gap between a stored row sum and its recomputation.
    pub fn max_row_sum_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| {
                let again = row.recompute_sum();
                if row.sum == 0.0 {
                    again.abs()
                } else {
                    ((again - row.sum) / row.sum).abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Builds `w(p, n)` for every `p ∈ P`, rows computed in parallel.
pub fn build_weights(
    partition: Arc<PrimePartition>,
    tuple: AdmissibleTuple,
    kind: WeightKind,
    theta: f64,
) -> Result<WeightTable> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!("theta must be positive, got {theta}")));
    }
    if tuple.r() > DEFAULT_R_CAP {
        return Err(Error::InvalidParameter(format!(
            "tuple length {} exceeds the cap {DEFAULT_R_CAP}",
            tuple.r()
        )));
    }
    if partition.p.is_empty() {
        return Err(Error::EmptyPrimeSet("P"));
    }
    if kind == WeightKind::Custom {
        return Err(Error::InvalidParameter("custom weights come from WeightTable::from_values".into()));
    }
    let y = partition.y as i64;
    let width = 2 * y as u64 + 1;
    let entries = width.saturating_mul(partition.p.len() as u64);
    if entries > MAX_ENTRIES {
        return Err(Error::InvalidParameter(format!(
            "weight table needs {entries} entries; budget is {MAX_ENTRIES}"
        )));
    }
    let level = (partition.x as f64).powf(theta);
    let sieving: Vec<u64> = sieve_primes(level.ceil() as u64)
        .iter()
        .filter(|&l| (l as f64) < level && l as usize > tuple.r() && l != partition.b0)
        .collect();
    let rows = partition
        .p
        .par_iter()
        .map(|&p| {
            let values = match kind {
                WeightKind::Uniform => vec![1.0; width as usize],
                WeightKind::Maynard => maynard_row(p, y, tuple.shifts(), &sieving, level),
                WeightKind::Custom => unreachable!(),
            };
            let sum = values.iter().copied().collect::<NeumaierSum>().value();
            WeightRow { p, y, values, sum }
        })
        .collect();
    Ok(WeightTable { partition, tuple, kind, theta, level, rows })
}

/// `(Σ_{D < R squarefree} μ(D) ∏_{ℓ | D} c_ℓ(n) F(log D / log R))²` over `n ∈ [−y, y]`,
/// where `c_ℓ(n) = #{i : ℓ | n + h_i p}` counts the ways to split `D` over the shifts.
fn maynard_row(p: u64, y: i64, h: &[i64], sieving: &[u64], level: f64) -> Vec<f64> {
    let width = (2 * y + 1) as usize;
    // divisor lists in CSR form: start[k]..start[k + 1] indexes (ℓ, c_ℓ)
    let mut counts = vec![0u32; width + 1];
    let mut classes: Vec<(u64, Vec<(i64, u32)>)> = Vec::with_capacity(sieving.len());
    for &l in sieving {
        let li = l as i64;
        let mut per: Vec<(i64, u32)> = Vec::new();
        for &hi in h {
            let rho = (-(hi as i128) * p as i128).rem_euclid(l as i128) as i64;
            match per.iter_mut().find(|e| e.0 == rho) {
                Some(e) => e.1 += 1,
                None => per.push((rho, 1)),
            }
        }
        for &(rho, _) in &per {
            let mut k = (rho - (-y)).rem_euclid(li) as usize;
            while k < width {
                counts[k + 1] += 1;
                k += l as usize;
            }
        }
        classes.push((l, per));
    }
    for k in 0..width {
        counts[k + 1] += counts[k];
    }
    let mut fill = counts.clone();
    let mut entries = vec![(0u64, 0u32); counts[width] as usize];
    for (l, per) in &classes {
        let li = *l as i64;
        for &(rho, c) in per {
            let mut k = (rho - (-y)).rem_euclid(li) as usize;
            while k < width {
                entries[fill[k] as usize] = (*l, c);
                fill[k] += 1;
                k += *l as usize;
            }
        }
    }
    let log_r = level.ln();
    let r = h.len() as i32;
    (0..width)
        .map(|k| {
            let divs = &entries[counts[k] as usize..counts[k + 1] as usize];
            let s = divisor_sum(divs, level, log_r, r);
            s * s
        })
        .collect()
}

/// `Σ μ(D) ∏ c_ℓ F(log D / log R)` over squarefree `D < R` built from `divs`
/// (ascending in `ℓ`).
fn divisor_sum(divs: &[(u64, u32)], level: f64, log_r: f64, r: i32) -> f64 {
    fn walk(divs: &[(u64, u32)], d: f64, sign: f64, mult: f64, level: f64, log_r: f64, r: i32) -> f64 {
        let mut total = sign * mult * (1.0 - d.ln() / log_r).powi(r);
        for (j, &(l, c)) in divs.iter().enumerate() {
            let next = d * l as f64;
            if next >= level {
                break;
            }
            total += walk(&divs[j + 1..], next, -sign, mult * f64::from(c), level, log_r, r);
        }
        total
    }
    walk(divs, 1.0, 1.0, 1.0, level, log_r, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{build_partition, derive_parameters, ParamOverrides};
    use crate::weights::first_primes_tuple;

    fn toy(x: f64, y: f64) -> Arc<PrimePartition> {
        let o = ParamOverrides {
            y: Some(y),
            z: Some(10.0),
            small_low: Some(3.0),
            small_high: Some(10.0),
            ..Default::default()
        };
        let params = derive_parameters(x, 0.1, 4.0, &o).unwrap();
        Arc::new(build_partition(&params, 1).unwrap())
    }

    fn is_squarefree(mut n: u64) -> bool {
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d * d) {
                return false;
            }
            if n.is_multiple_of(d) {
                n /= d;
            }
            d += 1;
        }
        true
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    /// Direct sum over `(d_1, …, d_r)` with `d_i | n + h_i p`.
    fn naive_weight(p: u64, n: i64, h: &[i64], level: f64, b0: u64) -> f64 {
        let r = h.len();
        let small: u64 = (2..=r as u64).filter(|&q| crate::math::is_prime_u64(q)).product();
        let cands: Vec<u64> = (1..level.ceil() as u64)
            .filter(|&d| (d as f64) < level && is_squarefree(d) && gcd(d, small) == 1)
            .filter(|&d| b0 == 1 || d % b0 != 0)
            .collect();
        let mob = |d: u64| {
            let mut k = 0;
            let mut m = d;
            let mut q = 2;
            while m > 1 {
                if m.is_multiple_of(q) {
                    k += 1;
                    m /= q;
                }
                q += 1;
            }
            if k % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        let mut total = 0.0;
        let mut stack = vec![(0usize, 1u64, 1.0f64)];
        while let Some((i, prod, mu)) = stack.pop() {
            if i == r {
                let t = (prod as f64).ln() / level.ln();
                total += mu * (1.0 - t).powi(r as i32);
                continue;
            }
            let v = n as i128 + h[i] as i128 * p as i128;
            for &d in &cands {
                let next = prod * d;
                if v % d as i128 == 0 && (next as f64) < level && gcd(prod, d) == 1 && is_squarefree(next) {
                    stack.push((i + 1, next, mu * mob(d)));
                }
            }
        }
        total * total
    }

    #[test]
    fn uniform_rows_are_constant() {
        let part = toy(100.0, 300.0);
        let w = build_weights(part.clone(), first_primes_tuple(2), WeightKind::Uniform, 0.25).unwrap();
        for row in w.rows() {
            assert_eq!(row.sum(), 601.0);
            assert_eq!(row.support_size(), 601);
        }
        assert_eq!(w.max_row_sum_error(), 0.0);
    }

    #[test]
    fn maynard_matches_direct_tuple_enumeration() {
        let part = toy(200.0, 500.0);
        let tuple = first_primes_tuple(3);
        let theta = 0.75;
        let w = build_weights(part.clone(), tuple.clone(), WeightKind::Maynard, theta).unwrap();
        let level = w.level();
        for &p in part.p.iter().take(4) {
            let row = w.row(p).unwrap();
            for n in (-500..=500).step_by(7) {
                let a = row.get(n);
                let b = naive_weight(p, n, tuple.shifts(), level, 1);
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "p={p} n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn maynard_unsieved_point_is_one() {
        let part = toy(200.0, 500.0);
        let tuple = first_primes_tuple(2);
        let w = build_weights(part.clone(), tuple.clone(), WeightKind::Maynard, 0.5).unwrap();
        let p = part.p[0];
        // shifts with no prime factor in (r, R) carry only D = 1
        let n = (-500..=500)
            .find(|&n| {
                tuple.shifts().iter().all(|&h| {
                    let v = (n + h * p as i64).unsigned_abs();
                    v != 0 && (3..w.level().ceil() as u64).all(|l| !crate::math::is_prime_u64(l) || (l as f64) >= w.level() || !v.is_multiple_of(l))
                })
            })
            .unwrap();
        assert_eq!(w.row(p).unwrap().get(n), 1.0);
    }

    #[test]
    fn maynard_respects_b0() {
        let o = ParamOverrides {
            y: Some(500.0),
            z: Some(10.0),
            small_low: Some(3.0),
            small_high: Some(10.0),
            ..Default::default()
        };
        let params = derive_parameters(200.0, 0.1, 4.0, &o).unwrap();
        let part = Arc::new(build_partition(&params, 11).unwrap());
        let tuple = first_primes_tuple(2);
        let w = build_weights(part.clone(), tuple.clone(), WeightKind::Maynard, 0.75).unwrap();
        let p = part.p[1];
        for n in (-500..=500).step_by(3) {
            let b = naive_weight(p, n, tuple.shifts(), w.level(), 11);
            assert!((w.row(p).unwrap().get(n) - b).abs() <= 1e-12 * b.max(1.0));
        }
    }

    #[test]
    fn row_sums_match_recomputation() {
        let part = toy(300.0, 2000.0);
        let w = build_weights(part, first_primes_tuple(4), WeightKind::Maynard, 0.6).unwrap();
        assert!(w.max_row_sum_error() <= 1e-12);
        assert!(w.rows().iter().all(|r| r.values().iter().all(|&v| v >= 0.0)));
    }

    #[test]
    fn rejects_bad_theta() {
        let part = toy(100.0, 300.0);
        assert!(build_weights(part, first_primes_tuple(2), WeightKind::Uniform, 0.0).is_err());
    }
}
