//! Admissible tuples, weight tables, their contracts and the n_p sampler.

use std::sync::Arc;

use gapchain::partition::{build_partition, derive_parameters, ParamOverrides};
use gapchain::seed::substream;
use gapchain::weights::{
    build_weights, first_primes_tuple, is_admissible, weight_contract_report, ContractOptions,
    NTildeSampler, WeightKind,
};

fn main() -> gapchain::Result<()> {
    println!("first_primes_tuple(4) = {:?}", first_primes_tuple(4).shifts());
    println!("(0, 2, 4) admissible: {}", is_admissible(&[0, 2, 4]));
    println!("(1, 9, 25, 49) admissible: {}", is_admissible(&[1, 9, 25, 49]));

    let overrides = ParamOverrides { y: Some(30_000.0), r: Some(4), ..Default::default() };
    let part = Arc::new(build_partition(&derive_parameters(1000.0, 0.4, 4.0, &overrides)?, 1)?);
    for kind in [WeightKind::Uniform, WeightKind::Maynard] {
        let table = build_weights(part.clone(), first_primes_tuple(4), kind, 0.5)?;
        let rep = weight_contract_report(&table, &ContractOptions::default());
        println!(
            "{:?}: rows {}, row-sum max/min {:.6}, off/on {:.4}, point mass {:.2e}, u_emp {:.3}",
            kind, rep.rows, rep.row_sum_ratio, rep.off_tuple_ratio, rep.max_point_mass, rep.u_empirical
        );
        let sampler = NTildeSampler::new(&table);
        let mut rng = substream(1, "example/weights", 0);
        let p = part.p[0];
        let draws: Vec<i64> = (0..8).map(|_| sampler.sample(p, &mut rng)).collect::<Result<_, _>>()?;
        println!("  n~_{p} draws: {draws:?}");
    }
    Ok(())
}
