//! Nibble covering on synthetic instances; leftover fraction against 5^-m.

use gapchain::covering::{coverage_estimate, nibble_cover, subset_leftover, synth_instance, EdgeProfile};

fn main() -> gapchain::Result<()> {
    let (n, p_count) = (100_000, 10_000);
    for m in 1..=3 {
        let instance = synth_instance(n, p_count, m, EdgeProfile::Poisson)?;
        let est = coverage_estimate(&instance, 200, 1)?;
        let res = nibble_cover(&instance, m, 42)?;
        let sub: Vec<u32> = (0..n as u32).step_by(10).collect();
        println!(
            "m = {m}: coverage {:.3} (sampled {:.3}), leftover {:.5}, subset {:.5}, target {:.5}, survivors {:?}",
            instance.coverage,
            est.mean,
            res.leftover_fraction(n),
            subset_leftover(&res, &sub) as f64 / sub.len() as f64,
            5f64.powi(-(m as i32)),
            res.survivors
        );
    }
    Ok(())
}
