//! Synthetic covering experiments.
//!
//! An instance has elements `0..N` and `P_count` random sets `e_p`, each
//! containing every element independently with probability `δ = C/P_count`
//! (or a uniform subset of the expected size), truncated to `r_cap`
//! elements. [`nibble_cover`] splits the sets into `m` blocks and removes
//! covered elements block by block; with total coverage `C = m·log 5` the
//! leftover fraction should sit near `5^{−m}`.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::substream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeProfile {
    /// Independent inclusion of each element.
    Poisson,
    /// A uniform subset of size `round(N·δ)`.
    FixedSize,
}

impl std::str::FromStr for EdgeProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" => Ok(EdgeProfile::Poisson),
            "fixed_size" | "fixed-size" => Ok(EdgeProfile::FixedSize),
            _ => Err(Error::InvalidParameter(format!("unknown edge profile {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringInstance {
    pub n: usize,
    pub p_count: usize,
    pub m: usize,
    pub profile: EdgeProfile,
    /// Total coverage `Σ_p P(q ∈ e_p)`.
    pub coverage: f64,
    /// Inclusion probability `P(q ∈ e_p)`.
    pub delta: f64,
    /// Fraction of elements allowed to miss the coverage target.
    pub kappa: f64,
    pub r_cap: usize,
    /// Sets forced to be the whole ground set.
    pub full_edges: Vec<usize>,
}

/// Default `r_cap`: four times the expected set size, at least 16.
fn default_r_cap(n: usize, delta: f64) -> usize {
    ((4.0 * n as f64 * delta).ceil() as usize).max(16).min(n)
}

/// Instance with coverage `m·log 5` spread evenly over the sets.
pub fn synth_instance(n: usize, p_count: usize, m: usize, profile: EdgeProfile) -> Result<CoveringInstance> {
    if n < 10 {
        return Err(Error::InvalidParameter(format!("N must be ≥ 10, got {n}")));
    }
    if m == 0 || p_count < m {
        return Err(Error::InvalidParameter(format!("need 1 ≤ m ≤ P_count, got m={m}, P_count={p_count}")));
    }
    let coverage = m as f64 * 5f64.ln();
    let delta = coverage / p_count as f64;
    if delta > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "inclusion probability C/P_count = {delta} exceeds 1"
        )));
    }
    Ok(CoveringInstance {
        n,
        p_count,
        m,
        profile,
        coverage,
        delta,
        kappa: 0.0,
        r_cap: default_r_cap(n, delta),
        full_edges: Vec::new(),
    })
}

impl CoveringInstance {
    pub fn with_r_cap(mut self, r_cap: usize) -> Self {
        self.r_cap = r_cap;
        self
    }

    pub fn with_full_edge(mut self, p: usize) -> Self {
        self.full_edges.push(p);
        self
    }

    /// Expected `#e_p` before truncation.
    pub fn expected_edge_size(&self) -> f64 {
        self.n as f64 * self.delta
    }

    /// Draws `e_p` (sorted); the flag reports whether `r_cap` truncated it.
    pub fn draw_edge<R: Rng + ?Sized>(&self, p: usize, rng: &mut R) -> (Vec<u32>, bool) {
        if self.full_edges.contains(&p) {
            return ((0..self.n as u32).collect(), false);
        }
        let k = match self.profile {
            EdgeProfile::Poisson => Binomial::new(self.n as u64, self.delta)
                .expect("delta lies in [0, 1]")
                .sample(rng) as usize,
            EdgeProfile::FixedSize => (self.n as f64 * self.delta).round() as usize,
        };
        let truncated = k > self.r_cap;
        let k = k.min(self.r_cap);
        let mut e: Vec<u32> = sample(rng, self.n, k).into_iter().map(|i| i as u32).collect();
        e.sort_unstable();
        (e, truncated)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverResult {
    /// `e′_p` for every set index `p`.
    pub eprime: Vec<Vec<u32>>,
    /// The block (round) of each set.
    pub block_of: Vec<usize>,
    /// Elements covered by no `e′_p`, ascending.
    pub leftover: Vec<u32>,
    pub rounds: usize,
    pub truncations: usize,
    /// Survivor counts after each round, starting with `N`.
    pub survivors: Vec<usize>,
}

impl CoverResult {
    pub fn leftover_fraction(&self, n: usize) -> f64 {
        self.leftover.len() as f64 / n as f64
    }
}

/// Blocked nibble: in round `j` every set of block `j` keeps only the
/// elements still uncovered, and those elements leave the survivor pool.
pub fn nibble_cover(instance: &CoveringInstance, m: usize, seed: u64) -> Result<CoverResult> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be ≥ 1".into()));
    }
    let mut order: Vec<usize> = (0..instance.p_count).collect();
    order.shuffle(&mut substream(seed, "cover/blocks", 0));
    let base = instance.p_count / m;
    let extra = instance.p_count % m;
    let mut blocks = Vec::with_capacity(m);
    let mut at = 0;
    for j in 0..m {
        let len = base + usize::from(j < extra);
        if len == 0 {
            return Err(Error::EmptyBlock(j));
        }
        blocks.push(&order[at..at + len]);
        at += len;
    }

    let mut alive = vec![true; instance.n];
    let mut eprime = vec![Vec::new(); instance.p_count];
    let mut block_of = vec![0; instance.p_count];
    let mut survivors = vec![instance.n];
    let mut truncations = 0;
    for (j, block) in blocks.iter().enumerate() {
        let drawn: Vec<(usize, Vec<u32>, bool)> = block
            .par_iter()
            .map(|&p| {
                let (e, t) = instance.draw_edge(p, &mut substream(seed, "cover/edge", p as u64));
                (p, e, t)
            })
            .collect();
        for (p, e, t) in &drawn {
            truncations += usize::from(*t);
            block_of[*p] = j;
            eprime[*p] = e.iter().copied().filter(|&q| alive[q as usize]).collect();
        }
        for (p, _, _) in &drawn {
            for &q in &eprime[*p] {
                alive[q as usize] = false;
            }
        }
        survivors.push(alive.iter().filter(|&&a| a).count());
    }
    let leftover = (0..instance.n as u32).filter(|&q| alive[q as usize]).collect();
    Ok(CoverResult { eprime, block_of, leftover, rounds: m, truncations, survivors })
}

/// `#(leftover ∩ qsub)`.
pub fn subset_leftover(result: &CoverResult, qsub: &[u32]) -> usize {
    qsub.iter()
        .filter(|q| result.leftover.binary_search(q).is_ok())
        .count()
}

/// Per-element coverage `Σ_p 1{q ∈ e_p}` averaged over independent draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub target: f64,
    pub mean: f64,
    pub std_error: f64,
    pub draws: u64,
    /// Largest per-element empirical inclusion frequency.
    pub max_inclusion: f64,
}

/// Estimates coverage over `draws` fresh draws of every `e_p`.
pub fn coverage_estimate(instance: &CoveringInstance, draws: u64, seed: u64) -> Result<CoverageEstimate> {
    if draws < 2 {
        return Err(Error::InvalidParameter("need at least 2 draws".into()));
    }
    let per_draw: Vec<Vec<u32>> = (0..draws)
        .into_par_iter()
        .map(|d| {
            let mut hits = vec![0u32; instance.n];
            for p in 0..instance.p_count {
                let idx = d * instance.p_count as u64 + p as u64;
                let (e, _) = instance.draw_edge(p, &mut substream(seed, "cover/coverage", idx));
                for q in e {
                    hits[q as usize] += 1;
                }
            }
            hits
        })
        .collect();
    let mut totals = vec![0u64; instance.n];
    let mut draw_means = Vec::with_capacity(per_draw.len());
    for hits in &per_draw {
        let mut s = 0u64;
        for (t, &h) in totals.iter_mut().zip(hits) {
            *t += u64::from(h);
            s += u64::from(h);
        }
        draw_means.push(s as f64 / instance.n as f64);
    }
    let n = draws as f64;
    let mean = draw_means.iter().sum::<f64>() / n;
    let var = draw_means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let max_inclusion = totals.iter().copied().max().unwrap_or(0) as f64
        / (n * instance.p_count as f64);
    Ok(CoverageEstimate {
        target: instance.coverage,
        mean,
        std_error: (var / n).sqrt(),
        draws,
        max_inclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_parameters() {
        let inst = synth_instance(100_000, 10_000, 1, EdgeProfile::Poisson).unwrap();
        assert!((inst.coverage - 1.609_437_912).abs() < 1e-9);
        assert!((inst.expected_edge_size() - 100_000.0 * inst.coverage / 10_000.0).abs() < 1e-9);
        assert!(synth_instance(5, 10, 1, EdgeProfile::Poisson).is_err());
        assert!(synth_instance(100, 2, 3, EdgeProfile::Poisson).is_err());
        assert!(synth_instance(100, 1, 1, EdgeProfile::Poisson).is_err());
    }

    #[test]
    fn full_edge_covers_everything() {
        let inst = synth_instance(1000, 50, 1, EdgeProfile::Poisson).unwrap().with_full_edge(7);
        let res = nibble_cover(&inst, 1, 3).unwrap();
        assert!(res.leftover.is_empty());
    }

    #[test]
    fn set_algebra_holds() {
        let inst = synth_instance(5000, 400, 3, EdgeProfile::Poisson).unwrap();
        let res = nibble_cover(&inst, 3, 11).unwrap();
        // removed[q] = first round whose sets contain q
        let mut removed = vec![usize::MAX; inst.n];
        for (e, &j) in res.eprime.iter().zip(&res.block_of) {
            for &q in e {
                removed[q as usize] = removed[q as usize].min(j);
            }
        }
        let mut seen = vec![false; inst.n];
        for (e, &j) in res.eprime.iter().zip(&res.block_of) {
            for &q in e {
                assert_eq!(removed[q as usize], j, "element {q} was already covered before round {j}");
                seen[q as usize] = true;
                assert!(res.leftover.binary_search(&q).is_err());
            }
        }
        assert_eq!(seen.iter().filter(|&&s| !s).count(), res.leftover.len());
        assert_eq!(*res.survivors.last().unwrap(), res.leftover.len());
        assert!(res.survivors.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn deterministic() {
        let inst = synth_instance(3000, 300, 2, EdgeProfile::FixedSize).unwrap();
        assert_eq!(nibble_cover(&inst, 2, 5).unwrap(), nibble_cover(&inst, 2, 5).unwrap());
    }

    #[test]
    fn truncation_is_counted() {
        let inst = synth_instance(2000, 100, 1, EdgeProfile::Poisson).unwrap().with_r_cap(5);
        let res = nibble_cover(&inst, 1, 2).unwrap();
        assert!(res.truncations > 90);
        assert!(res.eprime.iter().all(|e| e.len() <= 5));
    }

    #[test]
    fn subset_leftover_identities() {
        let inst = synth_instance(4000, 400, 1, EdgeProfile::Poisson).unwrap();
        let res = nibble_cover(&inst, 1, 8).unwrap();
        let all: Vec<u32> = (0..4000).collect();
        assert_eq!(subset_leftover(&res, &all), res.leftover.len());
        assert_eq!(subset_leftover(&res, &res.leftover), res.leftover.len());
    }

    #[test]
    fn leftover_decreases_with_m() {
        let mean = |m: usize| {
            let inst = synth_instance(20_000, 2000, m, EdgeProfile::Poisson).unwrap();
            (0..9).map(|s| nibble_cover(&inst, m, s).unwrap().leftover.len() as f64).sum::<f64>() / 9.0
        };
        let (a, b, c) = (mean(1), mean(2), mean(3));
        assert!(a > b && b > c, "{a} {b} {c}");
    }

    #[test]
    fn coverage_estimate_is_near_target() {
        let inst = synth_instance(2000, 500, 1, EdgeProfile::Poisson).unwrap();
        let est = coverage_estimate(&inst, 200, 4).unwrap();
        assert!((est.mean - est.target).abs() <= 3.0 * est.std_error, "{est:?}");
        assert!(est.max_inclusion <= 1.0);
    }
}
