//! Runs an experiment config file, or the toy sieve config when none is given.
//!
//! `cargo run --example run_config -- path/to/config.toml [out_dir]`

use gapchain::harness::{run_experiment, ExperimentConfig, Mode};

fn main() -> gapchain::Result<()> {
    let mut args = std::env::args().skip(1);
    let cfg = match args.next() {
        Some(path) => ExperimentConfig::load(path.as_ref())?,
        None => ExperimentConfig::toy(Mode::Sieve),
    };
    println!("{}", cfg.to_toml()?);
    let report = run_experiment(&cfg)?;
    for c in report.invariants.iter().chain(&report.expectations) {
        println!("{:<5} {}: {}", if c.passed { "ok" } else { "miss" }, c.name, c.detail);
    }
    if let Some(dir) = args.next() {
        for path in report.write(dir.as_ref())? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
