use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gapchain::harness::{run_and_write, ClassChoice, ExperimentConfig, Mode, Report};
use gapchain::weights::WeightKind;

#[derive(Parser)]
#[command(name = "gapchain", version, about = "Sieve constructions and certified chains of large prime gaps")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML experiment config; the subcommand overrides its mode.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for metrics, report, CSVs and artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Start from the desk-scale toy parameters.
    #[arg(long, global = true)]
    toy: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Sieve primes up to a limit and cross-check the tail.
    Primes {
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Sift (x, y] with a residue system and report the survivors.
    Sieve {
        #[arg(long)]
        x: Option<f64>,
        #[arg(long, value_parser = parse_classes)]
        classes: Option<ClassChoice>,
    },
    /// Build a weight table and report its contracts.
    Weights {
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        kind: Option<WeightKind>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        r: Option<usize>,
    },
    /// Run the random construction and its goodness statistics.
    Construct {
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Nibble-cover experiments on synthetic instances.
    Cover {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<usize>>,
        #[arg(long)]
        runs: Option<u64>,
    },
    /// Maier rows and a certified gap chain.
    Maier {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Direct scan for the largest k-chain of gaps below x.
    Gk {
        #[arg(long)]
        x: Option<u64>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Re-check a certificate file.
    Verify { certificate: Option<PathBuf> },
}

fn parse_classes(s: &str) -> Result<ClassChoice, String> {
    match s {
        "zeros" => Ok(ClassChoice::Zeros),
        "greedy" => Ok(ClassChoice::Greedy),
        "construct" => Ok(ClassChoice::Construct),
        _ => Err(format!("unknown class choice `{s}` (zeros, greedy, construct)")),
    }
}

fn mode_of(c: &Command) -> Mode {
    match c {
        Command::Primes { .. } => Mode::Primes,
        Command::Sieve { .. } => Mode::Sieve,
        Command::Weights { .. } => Mode::Weights,
        Command::Construct { .. } => Mode::Construct,
        Command::Cover { .. } => Mode::Cover,
        Command::Maier { .. } => Mode::Maier,
        Command::Gk { .. } => Mode::Gk,
        Command::Verify { .. } => Mode::Verify,
    }
}

fn build_config(cli: &Cli) -> gapchain::Result<ExperimentConfig> {
    let mode = mode_of(&cli.command);
    let mut cfg = match (&cli.global.config, cli.global.toy) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, true) => ExperimentConfig::toy(mode),
        (None, false) => ExperimentConfig::default(),
    };
    cfg.mode = mode;
    if let Some(seed) = cli.global.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.global.out {
        cfg.output.dir = Some(out.display().to_string());
    }
    match &cli.command {
        Command::Primes { limit } => set(&mut cfg.primes.limit, *limit),
        Command::Sieve { x, classes } => {
            set(&mut cfg.partition.x, *x);
            set(&mut cfg.sieve.classes, *classes);
        }
        Command::Weights { x, kind, theta, r } => {
            set(&mut cfg.partition.x, *x);
            set(&mut cfg.weights.kind, *kind);
            set(&mut cfg.weights.theta, *theta);
            if r.is_some() {
                cfg.weights.r = *r;
            }
        }
        Command::Construct { x, eta } => {
            set(&mut cfg.partition.x, *x);
            set(&mut cfg.construct.eta, *eta);
        }
        Command::Cover { n, m, runs } => {
            set(&mut cfg.cover.n, *n);
            set(&mut cfg.cover.m, m.clone());
            set(&mut cfg.cover.runs, *runs);
        }
        Command::Maier { k, epsilon, trials } => {
            set(&mut cfg.maier.k, *k);
            set(&mut cfg.maier.epsilon, *epsilon);
            set(&mut cfg.maier.trials, *trials);
        }
        Command::Gk { x, k } => {
            set(&mut cfg.gk.x, *x);
            set(&mut cfg.gk.k, *k);
        }
        Command::Verify { certificate } => {
            if let Some(c) = certificate {
                cfg.verify.certificate = Some(c.display().to_string());
            }
        }
    }
    Ok(cfg)
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn summarize(report: &Report) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    for c in &report.invariants {
        writeln!(out, "{} invariant {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail)?;
    }
    for c in &report.expectations {
        writeln!(out, "{} expect    {}: {}", if c.passed { "ok  " } else { "miss" }, c.name, c.detail)?;
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&report.metrics)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = build_config(&cli).and_then(|cfg| run_and_write(&cfg));
    match report {
        Ok(report) => {
            let _ = summarize(&report);
            if report.all_invariants_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
