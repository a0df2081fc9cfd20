use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{
    check_composite_witness, crt_combine_u64, is_prime, is_prime_u64, sieve_primes, BigNat,
    CompositeWitness, Primality, PrimalityPolicy,
};
use crate::seed::substream;
use crate::sieve::SievedSet;

use super::frame::MaierFrame;
use super::rows::row_primes;

pub const CERTIFICATE_VERSION: u32 = 1;
/// Rows examined per parallel batch in [`find_gap_chain`].
const BATCH: u64 = 64;

/// Everything needed to rebuild `P` and `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameSnapshot {
    pub x: u64,
    pub y: u64,
    pub b0: u64,
    pub d: u32,
    pub p: BigNat,
    pub m: BigNat,
    /// `(p, a_p)` for every sieving prime.
    pub classes: Vec<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// A sieving prime `p ≤ x` dividing the row value.
    SharedFactor { p: u64 },
    Witness { witness: CompositeWitness },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvidenceItem {
    pub offset: u64,
    #[serde(flatten)]
    pub evidence: Evidence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ListedPrime {
    pub offset: u64,
    /// 0 for a deterministic verdict.
    pub rounds: u32,
    pub error_bound: f64,
}

/// `k + 1` consecutive primes `zP + m + t` with every integer between them
/// shown composite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapChainCertificate {
    pub version: u32,
    pub library_version: String,
    pub frame: FrameSnapshot,
    pub z: BigNat,
    pub k: usize,
    pub epsilon: f64,
    pub primes: Vec<ListedPrime>,
    pub evidence: Vec<EvidenceItem>,
    pub min_gap: u64,
    /// Union bound on the chance that a listed prime is composite.
    pub error_budget: f64,
    pub seed: u64,
    pub trial: u64,
    pub policy: PrimalityPolicy,
}

impl GapChainCertificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Listed offsets, ascending.
    pub fn offsets(&self) -> Vec<u64> {
        self.primes.iter().map(|p| p.offset).collect()
    }

    /// The listed primes themselves.
    pub fn values(&self) -> Vec<BigNat> {
        let z = self.z.as_biguint();
        let base = z * self.frame.p.as_biguint() + self.frame.m.as_biguint();
        self.primes.iter().map(|p| BigNat::new(&base + p.offset)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissReport {
    pub trials: u64,
    pub k: usize,
    pub required_gap: f64,
    /// Largest `min` over `k` consecutive row gaps seen in any row.
    pub best_min_gap: Option<u64>,
    pub best_trial: Option<u64>,
    pub max_primes_in_row: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ChainSearch {
    Found(Box<GapChainCertificate>),
    NotFound(MissReport),
}

impl ChainSearch {
    pub fn certificate(&self) -> Option<&GapChainCertificate> {
        match self {
            ChainSearch::Found(c) => Some(c),
            ChainSearch::NotFound(_) => None,
        }
    }
}

/// Best run of `k + 1` consecutive entries: `(start, min gap)`, earliest on ties.
fn best_run(primes: &[u64], k: usize) -> Option<(usize, u64)> {
    if primes.len() < k + 1 {
        return None;
    }
    let gaps: Vec<u64> = primes.windows(2).map(|w| w[1] - w[0]).collect();
    (0..=gaps.len() - k)
        .map(|s| (s, gaps[s..s + k].iter().copied().min().unwrap()))
        .fold(None, |acc: Option<(usize, u64)>, e| match acc {
            Some(a) if a.1 >= e.1 => Some(a),
            _ => Some(e),
        })
}

/// Searches up to `trials` sampled rows for `k + 1` consecutive row primes
/// whose `k` gaps are all at least `epsilon·y`, and certifies the first hit.
#[allow(clippy::too_many_arguments)]
pub fn find_gap_chain(
    frame: &MaierFrame,
    t: &SievedSet,
    k: usize,
    epsilon: f64,
    trials: u64,
    seed: u64,
    policy: PrimalityPolicy,
) -> Result<ChainSearch> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be ≥ 1".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let need = epsilon * frame.y as f64;
    let mut miss = MissReport {
        trials,
        k,
        required_gap: need,
        best_min_gap: None,
        best_trial: None,
        max_primes_in_row: 0,
    };
    let mut start = 0;
    while start < trials {
        let end = (start + BATCH).min(trials);
        let rows: Vec<(u64, BigUint, Vec<u64>)> = (start..end)
            .into_par_iter()
            .map(|i| {
                let z = frame.sample_z(&mut substream(seed, "maier/chain", i));
                let primes = row_primes(frame, t, &z, policy);
                (i, z, primes)
            })
            .collect();
        for (i, z, primes) in rows {
            miss.max_primes_in_row = miss.max_primes_in_row.max(primes.len());
            if let Some((s, g)) = best_run(&primes, k) {
                if miss.best_min_gap.is_none_or(|b| g > b) {
                    miss.best_min_gap = Some(g);
                    miss.best_trial = Some(i);
                }
                if g as f64 >= need {
                    let cert = certify(frame, &z, &primes[s..=s + k], k, epsilon, seed, i, policy)?;
                    return Ok(ChainSearch::Found(Box::new(cert)));
                }
            }
        }
        start = end;
    }
    Ok(ChainSearch::NotFound(miss))
}

#[allow(clippy::too_many_arguments)]
fn certify(
    frame: &MaierFrame,
    z: &BigUint,
    chain: &[u64],
    k: usize,
    epsilon: f64,
    seed: u64,
    trial: u64,
    policy: PrimalityPolicy,
) -> Result<GapChainCertificate> {
    let mut primes = Vec::with_capacity(chain.len());
    for &a in chain {
        let verdict = is_prime(&BigNat::new(frame.row_value(z, a)), policy);
        primes.push(match verdict {
            Primality::Prime => ListedPrime { offset: a, rounds: 0, error_bound: 0.0 },
            Primality::ProbablyPrime { rounds, error_bound } => ListedPrime { offset: a, rounds, error_bound },
            Primality::Composite(_) => {
                return Err(Error::Dichotomy(format!("row value at offset {a} is not prime")))
            }
        });
    }
    let evidence = (chain[0] + 1..chain[k])
        .filter(|t| chain.binary_search(t).is_err())
        .map(|t| {
            let evidence = match frame.shared_factor(t) {
                Some(p) => Evidence::SharedFactor { p },
                None => match is_prime(&BigNat::new(frame.row_value(z, t)), policy) {
                    Primality::Composite(witness) => Evidence::Witness { witness },
                    _ => {
                        return Err(Error::Dichotomy(format!(
                            "offset {t} between listed primes is prime"
                        )))
                    }
                },
            };
            Ok(EvidenceItem { offset: t, evidence })
        })
        .collect::<Result<Vec<_>>>()?;
    let min_gap = chain.windows(2).map(|w| w[1] - w[0]).min().unwrap_or(0);
    let error_budget = primes.iter().map(|p| p.error_bound).sum();
    Ok(GapChainCertificate {
        version: CERTIFICATE_VERSION,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        frame: FrameSnapshot {
            x: frame.x,
            y: frame.y,
            b0: frame.b0,
            d: frame.d,
            p: frame.p.clone(),
            m: frame.m.clone(),
            classes: frame.system.iter().collect(),
        },
        z: BigNat::new(z.clone()),
        k,
        epsilon,
        primes,
        evidence,
        min_gap,
        error_budget,
        seed,
        trial,
        policy,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject(String),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// Re-checks a certificate without trusting anything it asserts.
pub fn verify_certificate(cert: &GapChainCertificate) -> Verdict {
    match check(cert) {
        Ok(()) => Verdict::Accept,
        Err(reason) => Verdict::Reject(reason),
    }
}

fn check(cert: &GapChainCertificate) -> std::result::Result<(), String> {
    let f = &cert.frame;
    if cert.version != CERTIFICATE_VERSION {
        return Err(format!("unsupported version {}", cert.version));
    }
    if f.b0 != 1 && !is_prime_u64(f.b0) {
        return Err(format!("B0 = {} is neither 1 nor prime", f.b0));
    }
    if f.d == 0 {
        return Err("D must be ≥ 1".into());
    }
    let expected: Vec<u64> = sieve_primes(f.x).iter().filter(|&p| p != f.b0).collect();
    let listed: Vec<u64> = f.classes.iter().map(|c| c.0).collect();
    if listed != expected {
        return Err("class list does not match the primes up to x without B0".into());
    }
    if let Some(&(p, a)) = f.classes.iter().find(|&&(p, a)| a >= p) {
        return Err(format!("class {a} for {p} is not reduced"));
    }
    let congruences: Vec<(u64, u64)> = f.classes.iter().map(|&(p, a)| ((p - a) % p, p)).collect();
    let (m, p_big) = crt_combine_u64(&congruences).map_err(|e| e.to_string())?;
    if p_big != f.p {
        return Err(format!("P mismatch: recomputed {p_big}"));
    }
    if m != f.m {
        return Err(format!("m mismatch: recomputed {m}"));
    }
    let z = cert.z.as_biguint();
    let z_bound = num_traits::pow(p_big.as_biguint().clone(), f.d as usize);
    if z == &BigUint::ZERO || z > &z_bound {
        return Err("z outside [1, P^D]".into());
    }
    if cert.primes.len() != cert.k + 1 {
        return Err(format!("{} primes listed, expected k + 1 = {}", cert.primes.len(), cert.k + 1));
    }
    let offsets = cert.offsets();
    if offsets.windows(2).any(|w| w[0] >= w[1]) {
        return Err("listed offsets are not strictly ascending".into());
    }
    if offsets[0] <= f.x || *offsets.last().unwrap() > f.y {
        return Err("listed offsets leave (x, y]".into());
    }
    let base = z * p_big.as_biguint() + m.as_biguint();
    let value = |t: u64| BigNat::new(&base + t);
    let bad = cert
        .primes
        .par_iter()
        .find_first(|lp| !is_prime(&value(lp.offset), cert.policy).is_prime());
    if let Some(lp) = bad {
        return Err(format!("listed offset {} is not prime", lp.offset));
    }

    let lo = offsets[0];
    let hi = *offsets.last().unwrap();
    let mut covered = BTreeSet::new();
    for item in &cert.evidence {
        if item.offset <= lo || item.offset >= hi {
            return Err(format!("evidence for {} lies outside the window", item.offset));
        }
        if offsets.binary_search(&item.offset).is_ok() {
            return Err(format!("evidence given for listed prime offset {}", item.offset));
        }
        if !covered.insert(item.offset) {
            return Err(format!("duplicate evidence for offset {}", item.offset));
        }
    }
    if let Some(t) = (lo + 1..hi).find(|t| offsets.binary_search(t).is_err() && !covered.contains(t)) {
        return Err(format!("no compositeness evidence for offset {t}"));
    }
    let failed = cert.evidence.par_iter().find_first(|item| {
        let n = value(item.offset);
        match &item.evidence {
            Evidence::SharedFactor { p } => {
                let p_ok = *p <= f.x && *p != f.b0 && is_prime_u64(*p);
                !(p_ok && n.as_biguint().is_multiple_of(&BigUint::from(*p)) && n.as_biguint() > &BigUint::from(*p))
            }
            Evidence::Witness { witness } => !check_composite_witness(&n, witness),
        }
    });
    if let Some(item) = failed {
        return Err(format!("evidence for offset {} does not hold", item.offset));
    }
    let min_gap = offsets.windows(2).map(|w| w[1] - w[0]).min().unwrap_or(0);
    if min_gap != cert.min_gap {
        return Err(format!("min_gap is {min_gap}, certificate states {}", cert.min_gap));
    }
    if (min_gap as f64) < cert.epsilon * f.y as f64 {
        return Err(format!("min_gap {min_gap} is below epsilon·y"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maier::{assemble_frame, DEFAULT_BUDGET_BITS};
    use crate::partition::{build_partition, derive_parameters, ParamOverrides};
    use crate::sieve::{sift_interval, ResidueSystem};

    fn frame() -> (MaierFrame, SievedSet) {
        let o = ParamOverrides {
            y: Some(150.0),
            z: Some(3.0),
            small_low: Some(2.0),
            small_high: Some(3.0),
            ..Default::default()
        };
        let part = build_partition(&derive_parameters(30.0, 0.1, 4.0, &o).unwrap(), 1).unwrap();
        let mut sys = ResidueSystem::new(1);
        for p in part.primes_to_x() {
            sys.insert(p, 0).unwrap();
        }
        let t = sift_interval(part.x, part.y, &sys).unwrap();
        (assemble_frame(&sys, &part, &t, 1, DEFAULT_BUDGET_BITS).unwrap(), t)
    }

    fn found(k: usize, eps: f64, seed: u64) -> GapChainCertificate {
        let (f, t) = frame();
        match find_gap_chain(&f, &t, k, eps, 400, seed, PrimalityPolicy::default()).unwrap() {
            ChainSearch::Found(c) => *c,
            ChainSearch::NotFound(m) => panic!("{m:?}"),
        }
    }

    #[test]
    fn best_run_prefers_largest_min_gap() {
        assert_eq!(best_run(&[1, 3, 13, 23, 25], 2), Some((1, 10)));
        assert_eq!(best_run(&[1, 3], 2), None);
    }

    #[test]
    fn certificate_round_trips_and_verifies() {
        let cert = found(2, 0.01, 3);
        assert_eq!(cert.primes.len(), 3);
        assert_eq!(verify_certificate(&cert), Verdict::Accept);
        let back = GapChainCertificate::from_json(&cert.to_json().unwrap()).unwrap();
        assert_eq!(back, cert);
        assert_eq!(verify_certificate(&back), Verdict::Accept);
    }

    #[test]
    fn tampering_is_rejected() {
        let cert = found(2, 0.01, 5);
        let mut moved = cert.clone();
        moved.primes[1].offset += 2;
        assert!(!verify_certificate(&moved).is_accept());

        let mut dropped = cert.clone();
        let gone = dropped.evidence.remove(dropped.evidence.len() / 2).offset;
        match verify_certificate(&dropped) {
            Verdict::Reject(r) => assert!(r.contains(&gone.to_string()), "{r}"),
            Verdict::Accept => panic!("accepted a certificate with a hole"),
        }

        let mut shifted = cert.clone();
        shifted.frame.m = BigNat::new(shifted.frame.m.as_biguint() + 1u32);
        assert!(!verify_certificate(&shifted).is_accept());
    }

    #[test]
    fn impossible_demand_reports_a_miss() {
        let (f, t) = frame();
        match find_gap_chain(&f, &t, 6, 0.9, 30, 1, PrimalityPolicy::default()).unwrap() {
            ChainSearch::NotFound(m) => {
                assert_eq!(m.trials, 30);
                assert!(m.required_gap > 100.0);
            }
            ChainSearch::Found(_) => panic!("impossible chain certified"),
        }
    }
}
