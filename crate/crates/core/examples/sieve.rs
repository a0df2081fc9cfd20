//! Sifting (x, y] with zero classes and with the greedy baseline.

use gapchain::partition::{build_partition, derive_parameters, ParamOverrides};
use gapchain::sieve::{greedy_rankin, residual_smooth_set, sift_interval, ResidueSystem};

fn main() -> gapchain::Result<()> {
    let overrides = ParamOverrides { y: Some(3000.0), ..Default::default() };
    let params = derive_parameters(1000.0, 0.4, 4.0, &overrides)?;
    let part = build_partition(&params, 1)?;

    let mut zeros = ResidueSystem::new(part.b0);
    for p in part.primes_to_x() {
        zeros.insert(p, 0)?;
    }
    let t = sift_interval(part.x, part.y, &zeros)?;
    println!("zero classes: #T = {} (the primes in ({}, {}])", t.len(), part.x, part.y);

    for y in [3000.0, 6000.0, 12_000.0] {
        let overrides = ParamOverrides { y: Some(y), ..Default::default() };
        let part = build_partition(&derive_parameters(1000.0, 0.4, 4.0, &overrides)?, 1)?;
        let medium: Vec<u64> = part
            .primes_to_x()
            .into_iter()
            .filter(|p| !part.s.contains(p) && part.p.binary_search(p).is_err())
            .collect();
        let greedy = greedy_rankin(&part, &medium)?;
        let t = sift_interval(part.x, part.y, &greedy)?;
        let residual = residual_smooth_set(&t, &part, &greedy)?;
        println!(
            "greedy on ({}, {}]: #T = {}, {} not primes of Q, first {:?}",
            part.x,
            part.y,
            t.len(),
            residual.residual_count(),
            t.iter().take(6).collect::<Vec<_>>()
        );
    }
    Ok(())
}
