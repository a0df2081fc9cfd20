//! Parameter derivation and the prime sets S, P, Q.

use gapchain::partition::{build_partition, derive_parameters, ParamOverrides};

fn main() -> gapchain::Result<()> {
    let params = derive_parameters(1e6, 0.4, 4.0, &ParamOverrides::default())?;
    println!("x = {}, y = {:.0}, z = {:.2}, u = {:.3}, r = {}", params.x, params.y, params.z, params.u, params.r);
    println!("sigma = {:.6}, epsilon = {:.4}", params.sigma, params.epsilon);
    for (name, source) in &params.provenance {
        println!("  {name}: {source:?}");
    }

    let part = build_partition(&params, 1)?;
    println!("#S = {}, #P = {}, #Q = {}", part.s.len(), part.p.len(), part.q.len());
    for w in &part.warnings {
        println!("warning: {w}");
    }

    let toy = ParamOverrides {
        y: Some(300.0),
        z: Some(10.0),
        r: Some(2),
        small_low: Some(3.0),
        small_high: Some(10.0),
        ..Default::default()
    };
    let part = build_partition(&derive_parameters(100.0, 0.1, 4.0, &toy)?, 1)?;
    println!("toy: S = {:?}, P = {:?}", part.s, part.p);
    println!("toy: Q has {} primes in ({}, {}]", part.q.len(), part.x, part.y);
    Ok(())
}
