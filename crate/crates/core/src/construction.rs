//! The random construction: uniform small classes `ā`, exact
//! `X_p(ā) = Σ_n P(ñ_p = n)·1{n + h_j p ∈ S(ā) ∀j}`, the good set
//! `𝒫(ā) = {p : |X_p/σ^r − 1| ≤ η}`, and conditional draws of `n_p` from
//! `Z_p(ā; n)/X_p(ā)` with `Z_p(ā; n) = 1{n + h_j p ∈ S(ā) ∀j}·P(ñ_p = n)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::NeumaierSum;
use crate::partition::PrimePartition;
use crate::seed::substream;
use crate::sieve::{sifted_membership, SmallClassVector};
use crate::weights::{WeightRow, WeightTable};

pub const DEFAULT_ETA: f64 = 0.1;
/// Largest number of `q` examined by [`goodness_report`].
pub const Q_SAMPLE_CAP: usize = 512;

/// Independent uniform residues `a_s mod s`, one per `s`.
pub fn sample_small_classes<R: Rng + ?Sized>(s: &[u64], rng: &mut R) -> SmallClassVector {
    let pairs = s.iter().map(|&s| (s, rng.random_range(0..s) as i64)).collect();
    SmallClassVector::new(pairs).expect("small primes are distinct primes")
}

/// Exact survival probability of a point set under uniform `ā`.
#[derive(Clone, Debug, PartialEq)]
pub struct Correlation {
    pub exact: BigRational,
    pub value: f64,
}

/// `∏_{s ∈ S} (1 − #{n_i mod s}/s)`.
pub fn correlation_probability(points: &[i64], s: &[u64]) -> Result<Correlation> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("at least one point is required".into()));
    }
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoint(w[0]));
    }
    let mut exact = BigRational::from_integer(BigInt::from(1));
    let mut classes = Vec::with_capacity(points.len());
    for &q in s {
        classes.clear();
        classes.extend(points.iter().map(|&n| n.rem_euclid(q as i64)));
        classes.sort_unstable();
        classes.dedup();
        let hit = classes.len() as u64;
        exact *= BigRational::new(BigInt::from(q - hit.min(q)), BigInt::from(q));
    }
    let value = exact.to_f64().unwrap_or(0.0);
    Ok(Correlation { exact, value })
}

fn survives(n: i64, p: u64, shifts: &[i64], abar: &SmallClassVector) -> bool {
    shifts
        .iter()
        .all(|&h| sifted_membership(i128::from(n) + i128::from(h) * i128::from(p), abar))
}

/// `X_p(ā)`, computed exactly from the row of `p`.
pub fn compute_xp(abar: &SmallClassVector, w: &WeightTable, p: u64) -> Result<f64> {
    let row = w.live_row(p)?;
    Ok(xp_of_row(abar, row, w.tuple().shifts()))
}

fn xp_of_row(abar: &SmallClassVector, row: &WeightRow, shifts: &[i64]) -> f64 {
    let mut acc = NeumaierSum::new();
    for (n, wt) in row.iter() {
        if survives(n, row.p(), shifts, abar) {
            acc.add(wt);
        }
    }
    acc.value() / row.sum()
}

/// `E_ā X_p = Σ_n P(ñ_p = n)·Pr(n + h_1 p, …, n + h_r p all survive)`.
pub fn expected_xp(w: &WeightTable, p: u64, s: &[u64]) -> Result<f64> {
    let row = w.live_row(p)?;
    let shifts = w.tuple().shifts();
    let mut acc = NeumaierSum::new();
    let mut pts = vec![0i64; shifts.len()];
    for (n, wt) in row.iter() {
        for (slot, &h) in pts.iter_mut().zip(shifts) {
            *slot = n + h * p as i64;
        }
        acc.add(wt * correlation_probability(&pts, s)?.value);
    }
    Ok(acc.value() / row.sum())
}

/// `{p : |X_p/σ^r − 1| ≤ η}` in ascending order.
pub fn select_good_p(xp: &BTreeMap<u64, f64>, sigma_r: f64, eta: f64) -> Vec<u64> {
    xp.iter()
        .filter(|(_, &x)| (x / sigma_r - 1.0).abs() <= eta)
        .map(|(&p, _)| p)
        .collect()
}

/// One run of the construction for a fixed `ā`.
#[derive(Clone, Debug)]
pub struct ConstructionRun {
    weights: Arc<WeightTable>,
    pub abar: SmallClassVector,
    pub xp: BTreeMap<u64, f64>,
    pub sigma: f64,
    pub sigma_r: f64,
    pub eta: f64,
    pub good: Vec<u64>,
    /// `n_p` for every `p ∈ P`; zero off the good set.
    pub npbar: BTreeMap<u64, i64>,
    pub seed: u64,
}

impl ConstructionRun {
    /// Computes every `X_p` and the good set; `n̄` is left empty.
    pub fn new(weights: Arc<WeightTable>, abar: SmallClassVector, eta: f64, seed: u64) -> Result<Self> {
        if !(eta >= 0.0) {
            return Err(Error::InvalidParameter(format!("eta must be ≥ 0, got {eta}")));
        }
        let part = weights.partition();
        let s_here: Vec<u64> = abar.primes().collect();
        if s_here != part.s {
            return Err(Error::InvalidParameter("ā must be indexed by S".into()));
        }
        let shifts = weights.tuple().shifts().to_vec();
        let xp = weights
            .rows()
            .par_iter()
            .map(|row| {
                if row.sum() > 0.0 {
                    Ok((row.p(), xp_of_row(&abar, row, &shifts)))
                } else {
                    Err(Error::ZeroRow(row.p()))
                }
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        let sigma = part.sigma();
        let sigma_r = sigma.powi(shifts.len() as i32);
        let good = select_good_p(&xp, sigma_r, eta);
        Ok(ConstructionRun {
            weights,
            abar,
            xp,
            sigma,
            sigma_r,
            eta,
            good,
            npbar: BTreeMap::new(),
            seed,
        })
    }

    /// Samples `ā` from `seed` and completes the run, including `n̄`.
    pub fn sample(weights: Arc<WeightTable>, eta: f64, seed: u64) -> Result<Self> {
        let abar = sample_small_classes(&weights.partition().s, &mut substream(seed, "abar", 0));
        let mut run = ConstructionRun::new(weights, abar, eta, seed)?;
        run.draw_npbar()?;
        Ok(run)
    }

    pub fn weights(&self) -> &WeightTable {
        &self.weights
    }

    pub fn partition(&self) -> &PrimePartition {
        self.weights.partition()
    }

    pub fn is_good(&self, p: u64) -> bool {
        self.good.binary_search(&p).is_ok()
    }

    /// `Z_p(ā; n)`; zero unless `n + h_j p ∈ S(ā)` for all `j`.
    pub fn z(&self, p: u64, n: i64) -> f64 {
        match self.weights.row(p) {
            Some(row) if row.sum() > 0.0 => {
                let wt = row.get(n);
                if wt != 0.0 && survives(n, p, self.weights.tuple().shifts(), &self.abar) {
                    wt / row.sum()
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }

    /// The support of `Z_p(ā; ·)` with its values.
    pub fn z_law(&self, p: u64) -> Result<Vec<(i64, f64)>> {
        let row = self.weights.live_row(p)?;
        let shifts = self.weights.tuple().shifts();
        Ok(row
            .iter()
            .filter(|&(n, _)| survives(n, p, shifts, &self.abar))
            .map(|(n, wt)| (n, wt / row.sum()))
            .collect())
    }

    /// Largest relative gap `|Σ_n Z_p(ā; n) − X_p| / X_p` over `P`.
    pub fn normalization_error(&self) -> Result<f64> {
        let errs = self
            .xp
            .par_iter()
            .map(|(&p, &x)| {
                let total: NeumaierSum = self.z_law(p)?.into_iter().map(|e| e.1).collect();
                let t = total.value();
                Ok(if x == 0.0 { t.abs() } else { ((t - x) / x).abs() })
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(errs.into_iter().fold(0.0, f64::max))
    }

    /// Draws `n_p` for every `p ∈ P`, each from its own substream.
    pub fn draw_npbar(&mut self) -> Result<()> {
        let seed = self.seed;
        let draws = self
            .weights
            .partition()
            .p
            .par_iter()
            .map(|&p| Ok((p, sample_np(self, p, &mut substream(seed, "np", p))?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        self.npbar = draws;
        Ok(())
    }
}

/// Draws `n_p` from `Z_p(ā; ·)/X_p(ā)`; primes off the good set get 0.
pub fn sample_np<R: Rng + ?Sized>(run: &ConstructionRun, p: u64, rng: &mut R) -> Result<i64> {
    if !run.is_good(p) {
        return Ok(0);
    }
    let law = run.z_law(p)?;
    let index = WeightedIndex::new(law.iter().map(|e| e.1)).map_err(|_| Error::ZeroRow(p))?;
    Ok(law[index.sample(rng)].0)
}

/// Main and error parts of `σ^{−r} Σ_{p ∈ 𝒫(ā)} Σ_h Z_p(ā; q − h p)` for one `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QGoodness {
    pub q: u64,
    pub main: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodnessReport {
    pub sigma: f64,
    pub sigma_r: f64,
    pub eta: f64,
    pub p_count: usize,
    pub good_count: usize,
    pub bad_fraction: f64,
    pub q_in_sifted: usize,
    pub q_sampled: usize,
    pub c_target: f64,
    pub main_mean: f64,
    /// Coefficient of variation of the main part across sampled `q`.
    pub main_dispersion: f64,
    pub main_over_target: f64,
    pub error_mean: f64,
    /// Fraction of sampled `q` whose error part exceeds a tenth of the main part.
    pub error_heavy_fraction: f64,
    pub per_q: Vec<QGoodness>,
}

/// Goodness statistics over a stratified sample of `Q ∩ S(ā)`.
///
/// Off-tuple shifts range over `h ∉ {h_i}` with `|h| ≤ y/x`.
pub fn goodness_report(run: &ConstructionRun, c_target: f64) -> GoodnessReport {
    let part = run.partition();
    let shifts = run.weights.tuple().shifts();
    let sifted: Vec<u64> = part
        .q
        .iter()
        .copied()
        .filter(|&q| sifted_membership(i128::from(q), &run.abar))
        .collect();
    let step = sifted.len().div_ceil(Q_SAMPLE_CAP).max(1);
    let radius = (part.y / part.x) as i64;
    let off: Vec<i64> = (-radius..=radius).filter(|h| !shifts.contains(h)).collect();
    let per_q: Vec<QGoodness> = sifted
        .par_iter()
        .step_by(step)
        .map(|&q| {
            let (mut main, mut error) = (NeumaierSum::new(), NeumaierSum::new());
            for &p in &run.good {
                for &h in shifts {
                    main.add(run.z(p, q as i64 - h * p as i64));
                }
                for &h in &off {
                    error.add(run.z(p, q as i64 - h * p as i64));
                }
            }
            QGoodness { q, main: main.value() / run.sigma_r, error: error.value() / run.sigma_r }
        })
        .collect();
    let n = per_q.len().max(1) as f64;
    let main_mean = per_q.iter().map(|g| g.main).sum::<f64>() / n;
    let var = per_q.iter().map(|g| (g.main - main_mean).powi(2)).sum::<f64>() / n;
    let error_mean = per_q.iter().map(|g| g.error).sum::<f64>() / n;
    let heavy = per_q.iter().filter(|g| g.error > g.main / 10.0).count() as f64 / n;
    let p_count = part.p.len();
    GoodnessReport {
        sigma: run.sigma,
        sigma_r: run.sigma_r,
        eta: run.eta,
        p_count,
        good_count: run.good.len(),
        bad_fraction: 1.0 - run.good.len() as f64 / p_count.max(1) as f64,
        q_in_sifted: sifted.len(),
        q_sampled: per_q.len(),
        c_target,
        main_mean,
        main_dispersion: if main_mean > 0.0 { var.sqrt() / main_mean } else { 0.0 },
        main_over_target: if c_target > 0.0 { main_mean / c_target } else { f64::NAN },
        error_mean,
        error_heavy_fraction: heavy,
        per_q,
    }
}

/// Sifted prime counts in a short window of `Q` over many `ā`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSurvival {
    pub lo: u64,
    pub hi: u64,
    pub primes_in_window: usize,
    pub expected: f64,
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

impl WindowSurvival {
    /// `|mean − expected|` in standard errors.
    pub fn z_score(&self) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == self.expected {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - self.expected).abs() / self.std_error
        }
    }
}

/// `#(Q ∩ [αy, βy] ∩ S(ā))` over `trials` seeded draws of `ā`, against the exact
/// sum of single-point survival probabilities.
pub fn window_survival(
    partition: &PrimePartition,
    alpha: f64,
    beta: f64,
    trials: u64,
    seed: u64,
) -> Result<WindowSurvival> {
    if !(0.0..1.0).contains(&alpha) || !(alpha < beta && beta <= 1.0) || trials < 2 {
        return Err(Error::InvalidParameter(format!(
            "need 0 ≤ α < β ≤ 1 and ≥ 2 trials, got α={alpha}, β={beta}, trials={trials}"
        )));
    }
    let y = partition.y as f64;
    let (lo, hi) = ((alpha * y).ceil() as u64, (beta * y).floor() as u64);
    let window: Vec<u64> = partition.q.iter().copied().filter(|&q| q >= lo && q <= hi).collect();
    let expected = window
        .iter()
        .map(|&q| correlation_probability(&[q as i64], &partition.s).map(|c| c.value))
        .sum::<Result<f64>>()?;
    let counts: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let abar = sample_small_classes(&partition.s, &mut substream(seed, "window", t));
            window
                .iter()
                .filter(|&&q| sifted_membership(i128::from(q), &abar))
                .count() as f64
        })
        .collect();
    let n = trials as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(WindowSurvival {
        lo,
        hi,
        primes_in_window: window.len(),
        expected,
        mean,
        std_error: (var / n).sqrt(),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{build_partition, derive_parameters, ParamOverrides};
    use crate::weights::{build_weights, first_primes_tuple, WeightKind};

    fn toy(small_high: f64) -> Arc<PrimePartition> {
        let o = ParamOverrides {
            y: Some(300.0),
            z: Some(small_high.max(2.5)),
            small_low: Some(3.0),
            small_high: Some(small_high),
            ..Default::default()
        };
        Arc::new(build_partition(&derive_parameters(100.0, 0.1, 4.0, &o).unwrap(), 1).unwrap())
    }

    fn table(part: Arc<PrimePartition>, r: usize, kind: WeightKind) -> Arc<WeightTable> {
        Arc::new(build_weights(part, first_primes_tuple(r), kind, 0.5).unwrap())
    }

    #[test]
    fn correlation_examples() {
        let c = correlation_probability(&[0, 1], &[3, 5]).unwrap();
        assert_eq!(c.exact, BigRational::new(1.into(), 5.into()));
        assert_eq!(correlation_probability(&[42], &[3, 5, 7]).unwrap().value, 16.0 / 35.0);
        assert!(matches!(correlation_probability(&[4, 4], &[3]), Err(Error::DuplicatePoint(4))));
    }

    #[test]
    fn empty_s_gives_unit_xp_and_full_good_set() {
        let part = toy(3.0);
        assert!(part.s.is_empty());
        let w = table(part.clone(), 2, WeightKind::Uniform);
        let run = ConstructionRun::new(w.clone(), SmallClassVector::default(), 0.0, 1).unwrap();
        assert!(run.xp.values().all(|&x| x == 1.0));
        assert_eq!(run.good, part.p);
        // conditional law equals the unconditioned one
        let law = run.z_law(53).unwrap();
        assert_eq!(law.len(), 601);
        assert!(law.iter().all(|&(_, z)| z == 1.0 / 601.0));
    }

    #[test]
    fn point_mass_xp_is_an_indicator() {
        let part = toy(10.0);
        let mut values = vec![vec![0.0; 601]; part.p.len()];
        for v in &mut values {
            v[300 + 1] = 1.0;
        }
        let w = Arc::new(WeightTable::from_values(part.clone(), first_primes_tuple(2), values).unwrap());
        let abar = SmallClassVector::new(vec![(5, 0), (7, 0)]).unwrap();
        for &p in &part.p {
            let want = [3i64, 5].iter().all(|&h| {
                let v = 1 + h * p as i64;
                v % 5 != 0 && v % 7 != 0
            });
            assert_eq!(compute_xp(&abar, &w, p).unwrap(), if want { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn normalization_and_support_of_np() {
        let part = toy(10.0);
        let w = table(part.clone(), 2, WeightKind::Maynard);
        let run = ConstructionRun::sample(w, f64::INFINITY, 9).unwrap();
        assert!(run.normalization_error().unwrap() <= 1e-12);
        assert_eq!(run.good.len(), part.p.len());
        for (&p, &n) in &run.npbar {
            for h in [3i64, 5] {
                assert!(sifted_membership(i128::from(n + h * p as i64), &run.abar));
            }
        }
    }

    #[test]
    fn off_good_set_draws_sentinel() {
        let part = toy(10.0);
        let w = table(part.clone(), 2, WeightKind::Uniform);
        let abar = SmallClassVector::new(vec![(5, 1), (7, 2)]).unwrap();
        let mut run = ConstructionRun::new(w, abar, -0.0, 4).unwrap();
        run.good.clear();
        assert_eq!(sample_np(&run, 53, &mut substream(1, "t", 0)).unwrap(), 0);
    }

    #[test]
    fn xp_average_matches_correlation_sum() {
        let part = toy(10.0);
        let w = table(part.clone(), 2, WeightKind::Maynard);
        let p = part.p[2];
        let exact = expected_xp(&w, p, &part.s).unwrap();
        let trials = 10_000;
        let xs: Vec<f64> = (0..trials)
            .map(|t| {
                let abar = sample_small_classes(&part.s, &mut substream(8, "xp_avg", t));
                compute_xp(&abar, &w, p).unwrap()
            })
            .collect();
        let mean = xs.iter().sum::<f64>() / trials as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0)).sqrt();
        assert!((mean - exact).abs() <= 4.0 * sd / (trials as f64).sqrt(), "{mean} vs {exact}");
    }

    #[test]
    fn uniform_single_shift_main_part_is_closed_form() {
        let part = toy(3.0);
        let w = table(part.clone(), 1, WeightKind::Uniform);
        let run = ConstructionRun::new(w.clone(), SmallClassVector::default(), f64::INFINITY, 0).unwrap();
        let rep = goodness_report(&run, 1.0);
        for g in &rep.per_q {
            let closed: f64 = part
                .p
                .iter()
                .map(|&p| w.row(p).unwrap().prob(g.q as i64 - 2 * p as i64))
                .sum();
            assert!((g.main - closed).abs() < 1e-12);
        }
        assert_eq!(rep.q_sampled, part.q.len());
    }

    #[test]
    fn window_survival_matches_expectation() {
        let part = toy(10.0);
        let rep = window_survival(&part, 0.5, 0.9, 4000, 77).unwrap();
        assert!(rep.z_score() <= 3.0, "{rep:?}");
    }

    #[test]
    fn small_class_marginals_and_pairs() {
        let s = [5u64, 7];
        let n = 100_000u64;
        let mut rng = substream(2, "classes", 0);
        let mut m5 = [0u32; 5];
        let mut joint = 0u32;
        for _ in 0..n {
            let a = sample_small_classes(&s, &mut rng);
            let c = a.classes();
            m5[c[0].1 as usize] += 1;
            if c[0].1 == 1 && c[1].1 == 3 {
                joint += 1;
            }
        }
        let expect = n as f64 / 5.0;
        let chi2: f64 = m5.iter().map(|&f| (f64::from(f) - expect).powi(2) / expect).sum();
        // 4 degrees of freedom; 18.47 is the 0.999 quantile
        assert!(chi2 < 18.47, "chi2 = {chi2}");
        let pj = 1.0 / 35.0;
        let se = (pj * (1.0 - pj) / n as f64).sqrt();
        assert!((f64::from(joint) / n as f64 - pj).abs() <= 4.0 * se);
    }
}
