//! The random construction: ā, X_p, the good set, n̄ and goodness.

use std::sync::Arc;

use gapchain::construction::{goodness_report, window_survival, ConstructionRun, DEFAULT_ETA};
use gapchain::partition::{build_partition, derive_parameters, ParamOverrides};
use gapchain::sieve::{assemble_full_system, sift_interval};
use gapchain::weights::{build_weights, first_primes_tuple, WeightKind};

fn main() -> gapchain::Result<()> {
    let overrides = ParamOverrides {
        y: Some(300.0),
        z: Some(10.0),
        r: Some(2),
        small_low: Some(3.0),
        small_high: Some(10.0),
        ..Default::default()
    };
    let part = Arc::new(build_partition(&derive_parameters(100.0, 0.1, 4.0, &overrides)?, 1)?);
    let table = Arc::new(build_weights(part.clone(), first_primes_tuple(2), WeightKind::Maynard, 0.5)?);
    let run = ConstructionRun::sample(table, DEFAULT_ETA, 2024)?;
    println!("abar = {:?}", run.abar.classes());
    println!("sigma = {:.4}, sigma^r = {:.4}", run.sigma, run.sigma_r);
    for (p, x) in &run.xp {
        println!("  X_{p} = {x:.4}  good = {}  n_p = {}", run.is_good(*p), run.npbar[p]);
    }
    println!("normalization error = {:e}", run.normalization_error()?);

    let good = goodness_report(&run, 1.0);
    println!("bad fraction {:.3}, main mean {:.4}, error mean {:.4}", good.bad_fraction, good.main_mean, good.error_mean);

    let system = assemble_full_system(&run.abar, &run.npbar, &part)?;
    let t = sift_interval(part.x, part.y, &system)?;
    println!("#T = {}: {:?}", t.len(), t.to_vec());

    let w = window_survival(&part, 0.5, 0.75, 2000, 7)?;
    println!("window [{}, {}]: mean {:.3} vs {:.3} expected (z = {:.2})", w.lo, w.hi, w.mean, w.expected, w.z_score());
    Ok(())
}
