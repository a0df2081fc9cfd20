use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use serde_json::json;

use crate::construction::{goodness_report, ConstructionRun};
use crate::covering::{nibble_cover, subset_leftover, synth_instance, CoverResult};
use crate::error::{Error, Result};
use crate::maier::{
    assemble_frame, find_gap_chain, gk_direct, sample_rows, verify_certificate, ChainSearch,
    GapChainCertificate, Verdict,
};
use crate::math::{is_prime_u64, sieve_primes};
use crate::partition::{build_partition, derive_parameters, Params, PrimePartition};
use crate::seed::substream;
use crate::sieve::{
    assemble_full_system, greedy_rankin, residual_smooth_set, sift_interval, sifted_membership,
    ResidueSystem, SievedSet,
};
use crate::weights::{
    build_weights, first_primes_tuple, weight_contract_report, AdmissibleTuple, ContractOptions,
    WeightContractReport, WeightTable,
};

use super::config::{ClassChoice, ExperimentConfig, Mode};
use super::report::{Report, Table};

/// Relative tolerance for the normalization identities.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

struct Clock<'a> {
    report: &'a mut Report,
    start: Instant,
}

fn timed<T>(report: &mut Report, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let clock = Clock { start: Instant::now(), report };
    let out = f();
    clock.report.timings.insert(stage.to_string(), clock.start.elapsed().as_secs_f64());
    out
}

/// Runs the pipeline selected by `config.mode`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    let mut report = Report::new(config.clone());
    let started = Instant::now();
    match config.mode {
        Mode::Primes => primes(config, &mut report)?,
        Mode::Sieve => sieve(config, &mut report)?,
        Mode::Weights => weights(config, &mut report)?,
        Mode::Construct => construct(config, &mut report)?,
        Mode::Cover => cover(config, &mut report)?,
        Mode::Maier => maier(config, &mut report)?,
        Mode::Gk => gk(config, &mut report)?,
        Mode::Verify => verify(config, &mut report)?,
    }
    report.metric("mode", config.mode.name())?;
    report.timings.insert("total".into(), started.elapsed().as_secs_f64());
    Ok(report)
}

/// [`run_experiment`] followed by [`Report::write`] when an output directory is set.
pub fn run_and_write(config: &ExperimentConfig) -> Result<Report> {
    let report = run_experiment(config)?;
    if let Some(dir) = &config.output.dir {
        report.write(Path::new(dir))?;
    }
    Ok(report)
}

fn context(cfg: &ExperimentConfig, report: &mut Report) -> Result<(Params, Arc<PrimePartition>)> {
    let pc = &cfg.partition;
    let params = derive_parameters(pc.x, pc.c, pc.a, &pc.overrides)?;
    let partition = Arc::new(build_partition(&params, pc.b0)?);
    report.metric("params", &params)?;
    report.metric(
        "partition",
        json!({
            "x": partition.x,
            "y": partition.y,
            "b0": partition.b0,
            "s": partition.s,
            "p_count": partition.p.len(),
            "q_count": partition.q.len(),
            "warnings": partition.warnings,
        }),
    )?;
    report.invariant("partition", partition.validate().is_ok(), "ranges, disjointness, B0 exclusion");
    Ok((params, partition))
}

fn tuple_for(cfg: &ExperimentConfig, params: &Params) -> Result<AdmissibleTuple> {
    match &cfg.weights.tuple {
        Some(h) => AdmissibleTuple::new(h.clone()),
        None => Ok(first_primes_tuple(cfg.weights.r.unwrap_or(params.r as usize).max(1))),
    }
}

fn weight_table(
    cfg: &ExperimentConfig,
    params: &Params,
    partition: &Arc<PrimePartition>,
    report: &mut Report,
) -> Result<Arc<WeightTable>> {
    let tuple = tuple_for(cfg, params)?;
    let table = timed(report, "weights", || {
        build_weights(partition.clone(), tuple, cfg.weights.kind, cfg.weights.theta)
    })?;
    let err = table.max_row_sum_error();
    let nonneg = table.rows().iter().all(|r| r.values().iter().all(|&w| w >= 0.0));
    report.invariant(
        "weight_row_sums",
        err <= NORMALIZATION_TOLERANCE,
        format!("max relative row-sum error {err:e}"),
    );
    report.invariant("weight_nonnegative", nonneg, "every w(p, n) ≥ 0");
    Ok(Arc::new(table))
}

fn contracts(cfg: &ExperimentConfig, table: &WeightTable, report: &mut Report) -> Result<WeightContractReport> {
    let options = ContractOptions { q_sample_cap: cfg.weights.q_sample_cap, h_radius: None };
    let rep = timed(report, "contracts", || Ok(weight_contract_report(table, &options)))?;
    let mut rows = Table::new("weight_rows", &["p", "row_sum", "support", "max_point_mass"]);
    for row in table.rows() {
        rows.push(vec![
            row.p().to_string(),
            row.sum().to_string(),
            row.support_size().to_string(),
            (row.max_weight() / row.sum()).to_string(),
        ]);
    }
    let mut off = Table::new("off_tuple", &["h", "aggregate", "ratio"]);
    for &(h, v) in &rep.off_tuple {
        let ratio = if rep.on_tuple_scale > 0.0 { v / rep.on_tuple_scale } else { f64::NAN };
        off.push(vec![h.to_string(), v.to_string(), ratio.to_string()]);
    }
    report.tables.push(rows);
    report.tables.push(off);
    let mut summary = serde_json::to_value(&rep)?;
    if let Some(obj) = summary.as_object_mut() {
        obj.remove("off_tuple");
    }
    report.metric("weight_contracts", summary)?;
    report.expect("row_sum_ratio", rep.row_sum_ratio <= 1.1, format!("max/min = {}", rep.row_sum_ratio));
    report.expect("off_tuple_ratio", rep.off_tuple_ratio <= 0.1, format!("ratio = {}", rep.off_tuple_ratio));
    report.expect("point_mass", rep.max_point_mass <= 1e-2, format!("max = {}", rep.max_point_mass));
    Ok(rep)
}

/// The full system for `choice`, with the construction run when one was made.
fn residue_system(
    cfg: &ExperimentConfig,
    choice: ClassChoice,
    params: &Params,
    partition: &Arc<PrimePartition>,
    report: &mut Report,
) -> Result<(ResidueSystem, Option<ConstructionRun>)> {
    match choice {
        ClassChoice::Zeros => {
            let mut system = ResidueSystem::new(partition.b0);
            for p in partition.primes_to_x() {
                system.insert(p, 0)?;
            }
            Ok((system, None))
        }
        ClassChoice::Greedy => {
            let medium: Vec<u64> = partition
                .primes_to_x()
                .into_iter()
                .filter(|p| !partition.s.contains(p) && partition.p.binary_search(p).is_err())
                .collect();
            Ok((timed(report, "greedy", || greedy_rankin(partition, &medium))?, None))
        }
        ClassChoice::Construct => {
            let table = weight_table(cfg, params, partition, report)?;
            let run = construction_run(cfg, table, report)?;
            let system = assemble_full_system(&run.abar, &run.npbar, partition)?;
            Ok((system, Some(run)))
        }
    }
}

fn construction_run(cfg: &ExperimentConfig, table: Arc<WeightTable>, report: &mut Report) -> Result<ConstructionRun> {
    let run = timed(report, "construct", || ConstructionRun::sample(table, cfg.construct.eta, cfg.seed))?;
    let norm = run.normalization_error()?;
    report.invariant(
        "z_normalization",
        norm <= NORMALIZATION_TOLERANCE,
        format!("max |Σ Z_p − X_p| / X_p = {norm:e}"),
    );
    let shifts = run.weights().tuple().shifts().to_vec();
    let support_ok = run.good.iter().all(|&p| {
        let n = run.npbar[&p];
        shifts
            .iter()
            .all(|&h| sifted_membership(i128::from(n) + i128::from(h) * i128::from(p), &run.abar))
    });
    report.invariant("np_support", support_ok, "every n_p + h_j p lies in S(ā)");
    let ratios: Vec<f64> = run.xp.values().map(|x| x / run.sigma_r).collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    report.metric(
        "construction",
        json!({
            "abar": run.abar.classes(),
            "sigma": run.sigma,
            "sigma_r": run.sigma_r,
            "eta": run.eta,
            "good_count": run.good.len(),
            "p_count": run.xp.len(),
            "xp_over_sigma_r_min": lo,
            "xp_over_sigma_r_max": hi,
            "normalization_error": norm,
        }),
    )?;
    let mut xp = Table::new("xp", &["p", "x_p", "x_p_over_sigma_r", "good", "n_p"]);
    for (&p, &x) in &run.xp {
        xp.push(vec![
            p.to_string(),
            x.to_string(),
            (x / run.sigma_r).to_string(),
            run.is_good(p).to_string(),
            run.npbar[&p].to_string(),
        ]);
    }
    report.tables.push(xp);
    Ok(run)
}

fn sifted(partition: &PrimePartition, system: &ResidueSystem, report: &mut Report) -> Result<SievedSet> {
    let t = timed(report, "sift", || sift_interval(partition.x, partition.y, system))?;
    report.invariant("bitset_count", t.recount() == t.len(), format!("#T = {}", t.len()));
    let residual = residual_smooth_set(&t, partition, system);
    report.invariant(
        "dichotomy",
        residual.is_ok(),
        residual.as_ref().map_or_else(|e| e.to_string(), |_| "every member is in R or a prime of Q".into()),
    );
    let residual = residual?;
    report.invariant(
        "residual_split",
        residual.residual_count() + residual.q_prime_count == residual.t_count,
        format!("#R = {}, #Q-primes = {}", residual.residual_count(), residual.q_prime_count),
    );
    report.metric("residual", &residual)?;
    Ok(t)
}

fn primes(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let limit = cfg.primes.limit;
    let list = timed(report, "sieve_primes", || Ok(sieve_primes(limit)))?;
    let tail_lo = limit.saturating_sub(10_000);
    let agrees = (tail_lo..=limit).all(|n| is_prime_u64(n) == list.contains(n));
    report.invariant("tail_agreement", agrees, format!("sieve and Miller–Rabin agree on [{tail_lo}, {limit}]"));
    report.metric(
        "primes",
        json!({ "limit": limit, "count": list.len(), "largest": list.as_slice().last() }),
    )
}

fn sieve(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let (params, partition) = context(cfg, report)?;
    let (system, _) = residue_system(cfg, cfg.sieve.classes, &params, &partition, report)?;
    let t = sifted(&partition, &system, report)?;
    let x = partition.x as f64;
    let y = partition.y as f64;
    let w = cfg.sieve.windows.max(1);
    let mut windows = Table::new("short_intervals", &["alpha", "beta", "count", "k_ratio"]);
    let mut k_max: f64 = 0.0;
    for j in 0..w {
        let (alpha, beta) = (f64::from(j) / f64::from(w), f64::from(j + 1) / f64::from(w));
        let lo = ((alpha * y).ceil() as u64).max(partition.x + 1);
        let hi = (beta * y).floor() as u64;
        let count = if lo <= hi { t.count_in(lo, hi) } else { 0 };
        let denom = (beta - alpha + params.epsilon) * t.len() as f64;
        let k = if denom > 0.0 { count as f64 / denom } else { 0.0 };
        k_max = k_max.max(k);
        windows.push(vec![alpha.to_string(), beta.to_string(), count.to_string(), k.to_string()]);
    }
    report.tables.push(windows);
    report.metric(
        "sieve",
        json!({
            "classes": cfg.sieve.classes,
            "system_size": system.len(),
            "t_count": t.len(),
            "t_ratio": t.len() as f64 * x.ln() / (params.a * x),
            "short_interval_k_max": k_max,
            "survivors": t.to_export(),
        }),
    )
}

fn weights(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let (params, partition) = context(cfg, report)?;
    let table = weight_table(cfg, &params, &partition, report)?;
    contracts(cfg, &table, report)?;
    Ok(())
}

fn construct(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let (params, partition) = context(cfg, report)?;
    let table = weight_table(cfg, &params, &partition, report)?;
    let rep = contracts(cfg, &table, report)?;
    let run = construction_run(cfg, table, report)?;
    let x = partition.x as f64;
    let y = partition.y as f64;
    let c_emp = rep.u_empirical / run.sigma * x / (2.0 * y);
    let good = timed(report, "goodness", || Ok(goodness_report(&run, c_emp)))?;
    let mut per_q = Table::new("goodness", &["q", "main", "error"]);
    for g in &good.per_q {
        per_q.push(vec![g.q.to_string(), g.main.to_string(), g.error.to_string()]);
    }
    report.tables.push(per_q);
    let mut summary = serde_json::to_value(&good)?;
    if let Some(obj) = summary.as_object_mut() {
        obj.remove("per_q");
        obj.insert("c_target_nominal".into(), json!(params.c_target));
    }
    report.metric("goodness", summary)?;
    report.expect("bad_fraction", good.bad_fraction < 0.2, format!("{}", good.bad_fraction));
    report.expect(
        "error_heavy_fraction",
        good.error_heavy_fraction < 0.1,
        format!("{}", good.error_heavy_fraction),
    );
    report.expect("main_dispersion", good.main_dispersion < 0.3, format!("{}", good.main_dispersion));
    let system = assemble_full_system(&run.abar, &run.npbar, &partition)?;
    let t = sifted(&partition, &system, report)?;
    report.metric("t_count", t.len())
}

/// Median of a non-empty list.
fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn cover_algebra_ok(res: &CoverResult) -> bool {
    let mut first = vec![usize::MAX; res.survivors[0]];
    for (e, &j) in res.eprime.iter().zip(&res.block_of) {
        for &q in e {
            first[q as usize] = first[q as usize].min(j);
        }
    }
    let fresh = res
        .eprime
        .iter()
        .zip(&res.block_of)
        .all(|(e, &j)| e.iter().all(|&q| first[q as usize] == j));
    let disjoint = res.leftover.iter().all(|&q| first[q as usize] == usize::MAX);
    fresh && disjoint
}

fn cover(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let cc = &cfg.cover;
    let mut runs = Table::new("cover_runs", &["m", "run", "leftover", "fraction", "subset_fraction", "truncations"]);
    let mut per_m = Vec::new();
    let mut algebra = true;
    for &m in &cc.m {
        let instance = synth_instance(cc.n, cc.p_count, m, cc.profile)?;
        let target = 5f64.powi(-(m as i32));
        let mut fractions = Vec::new();
        let mut sub_fractions = Vec::new();
        for j in 0..cc.runs {
            let run_seed: u64 = substream(cfg.seed, "cover/run", (m as u64) << 32 | j).random();
            let res = timed(report, &format!("cover_m{m}_run{j}"), || nibble_cover(&instance, m, run_seed))?;
            algebra &= cover_algebra_ok(&res);
            let size = ((cc.n as f64 * cc.subset_fraction).round() as usize).clamp(1, cc.n);
            let mut sub: Vec<u32> = rand::seq::index::sample(&mut substream(run_seed, "cover/subset", 0), cc.n, size)
                .into_iter()
                .map(|i| i as u32)
                .collect();
            sub.sort_unstable();
            let frac = res.leftover_fraction(cc.n);
            let sub_frac = subset_leftover(&res, &sub) as f64 / size as f64;
            runs.push(vec![
                m.to_string(),
                j.to_string(),
                res.leftover.len().to_string(),
                frac.to_string(),
                sub_frac.to_string(),
                res.truncations.to_string(),
            ]);
            fractions.push(frac);
            sub_fractions.push(sub_frac);
        }
        let med = median(&mut fractions);
        let sub_med = median(&mut sub_fractions);
        let rel = (med - target).abs() / target;
        let sub_rel = (sub_med - target).abs() / target;
        report.expect(&format!("leftover_m{m}"), rel <= cc.tolerance, format!("median {med}, target {target}"));
        report.expect(
            &format!("subset_leftover_m{m}"),
            sub_rel <= cc.subset_tolerance,
            format!("median {sub_med}, target {target}"),
        );
        per_m.push(json!({
            "m": m,
            "coverage": instance.coverage,
            "delta": instance.delta,
            "r_cap": instance.r_cap,
            "target": target,
            "median_leftover_fraction": med,
            "relative_error": rel,
            "median_subset_fraction": sub_med,
            "subset_relative_error": sub_rel,
        }));
    }
    report.invariant("cover_set_algebra", algebra, "e′_p ⊆ W_{j−1} and leftover ∩ e′_p = ∅");
    report.tables.push(runs);
    report.metric("cover", json!({ "n": cc.n, "p_count": cc.p_count, "runs": cc.runs, "by_m": per_m }))
}

fn maier(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let mc = &cfg.maier;
    let (params, partition) = context(cfg, report)?;
    let (system, _) = residue_system(cfg, mc.classes, &params, &partition, report)?;
    let t = sifted(&partition, &system, report)?;
    let frame = timed(report, "frame", || assemble_frame(&system, &partition, &t, mc.d, mc.budget_bits))?;
    let sound = (partition.x + 1..=partition.y)
        .filter(|&v| !t.contains(v))
        .all(|v| frame.shared_factor(v).is_some());
    report.invariant("frame_soundness", sound, "every non-survivor shares a prime factor with P");
    let rows = timed(report, "rows", || sample_rows(&frame, &t, mc.row_trials, cfg.seed, mc.policy))?;
    report.expect("rows_hit", rows.mean > 0.0, format!("mean N(z) = {}", rows.mean));
    let mut row_table = Table::new("row_counts", &["trial", "count"]);
    for (i, c) in rows.counts.iter().enumerate() {
        row_table.push(vec![i.to_string(), c.to_string()]);
    }
    report.tables.push(row_table);
    let mut summary = serde_json::to_value(&rows)?;
    if let Some(obj) = summary.as_object_mut() {
        obj.remove("counts");
    }
    report.metric(
        "frame",
        json!({ "p": frame.p, "m": frame.m, "d": frame.d, "p_bits": frame.p.bits(), "t_count": t.len() }),
    )?;
    report.metric("rows", summary)?;
    let search = timed(report, "chain", || {
        find_gap_chain(&frame, &t, mc.k, mc.epsilon, mc.trials, cfg.seed, mc.policy)
    })?;
    match search {
        ChainSearch::Found(cert) => {
            let verdict = verify_certificate(&cert);
            report.invariant("certificate_verifies", verdict.is_accept(), format!("{verdict:?}"));
            report.expect("chain_found", true, format!("trial {}", cert.trial));
            report.metric(
                "chain",
                json!({
                    "found": true,
                    "z": cert.z,
                    "offsets": cert.offsets(),
                    "min_gap": cert.min_gap,
                    "evidence_items": cert.evidence.len(),
                    "error_budget": cert.error_budget,
                    "trial": cert.trial,
                }),
            )?;
            report.artifacts.push(("certificate.json".into(), cert.to_json()?));
        }
        ChainSearch::NotFound(miss) => {
            report.expect("chain_found", false, "no qualifying row within the trial budget");
            report.metric("chain", json!({ "found": false, "miss": miss }))?;
        }
    }
    Ok(())
}

fn gk(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let value = timed(report, "gk", || gk_direct(cfg.gk.x, cfg.gk.k))?;
    report.metric("gk", json!({ "x": cfg.gk.x, "k": cfg.gk.k, "value": value }))
}

fn verify(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let path = cfg
        .verify
        .certificate
        .as_deref()
        .ok_or_else(|| Error::Config("verify mode needs verify.certificate".into()))?;
    let cert = GapChainCertificate::from_json(&std::fs::read_to_string(path)?)?;
    let verdict = timed(report, "verify", || Ok(verify_certificate(&cert)))?;
    report.invariant("certificate_verifies", verdict.is_accept(), format!("{verdict:?}"));
    let reason = match &verdict {
        Verdict::Accept => None,
        Verdict::Reject(r) => Some(r.clone()),
    };
    report.metric(
        "verify",
        json!({ "accepted": verdict.is_accept(), "reason": reason, "k": cert.k, "min_gap": cert.min_gap }),
    )
}
