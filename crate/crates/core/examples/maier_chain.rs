//! A Maier frame over a toy sieved interval and a certified k = 2 chain.

use gapchain::maier::{assemble_frame, find_gap_chain, sample_rows, verify_certificate, ChainSearch, DEFAULT_BUDGET_BITS};
use gapchain::math::PrimalityPolicy;
use gapchain::partition::{build_partition, derive_parameters, ParamOverrides};
use gapchain::sieve::{sift_interval, ResidueSystem};

fn main() -> gapchain::Result<()> {
    let overrides = ParamOverrides {
        y: Some(150.0),
        z: Some(3.0),
        small_low: Some(2.0),
        small_high: Some(3.0),
        ..Default::default()
    };
    let part = build_partition(&derive_parameters(30.0, 0.1, 4.0, &overrides)?, 1)?;
    let mut system = ResidueSystem::new(1);
    for p in part.primes_to_x() {
        system.insert(p, 0)?;
    }
    let t = sift_interval(part.x, part.y, &system)?;
    let frame = assemble_frame(&system, &part, &t, 1, DEFAULT_BUDGET_BITS)?;
    println!("P = {}, m = {}, #T = {}", frame.p, frame.m, t.len());

    let policy = PrimalityPolicy::default();
    let rows = sample_rows(&frame, &t, 200, 3, policy)?;
    println!("mean primes per row {:.3}, variance {:.3}", rows.mean, rows.variance);

    match find_gap_chain(&frame, &t, 2, 0.1, 1000, 3, policy)? {
        ChainSearch::Found(cert) => {
            println!("row z = {}, offsets {:?}, min gap {}", cert.z, cert.offsets(), cert.min_gap);
            println!("verdict: {:?}", verify_certificate(&cert));
            let mut forged = (*cert).clone();
            forged.primes[0].offset += 1;
            println!("forged verdict: {:?}", verify_certificate(&forged));
        }
        ChainSearch::NotFound(miss) => println!("no chain: {miss:?}"),
    }
    Ok(())
}
