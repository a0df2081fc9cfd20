use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::construction::DEFAULT_ETA;
use crate::covering::EdgeProfile;
use crate::error::{Error, Result};
use crate::maier::{DEFAULT_BUDGET_BITS, DEFAULT_D};
use crate::math::PrimalityPolicy;
use crate::partition::{ParamOverrides, DEFAULT_A};
use crate::weights::{WeightKind, DEFAULT_THETA};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Primes,
    Sieve,
    Weights,
    Construct,
    Cover,
    Maier,
    Gk,
    Verify,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Primes => "primes",
            Mode::Sieve => "sieve",
            Mode::Weights => "weights",
            Mode::Construct => "construct",
            Mode::Cover => "cover",
            Mode::Maier => "maier",
            Mode::Gk => "gk",
            Mode::Verify => "verify",
        }
    }
}

/// How the classes `a_p` for `p ≤ x` are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassChoice {
    /// `a_p = 0` throughout.
    Zeros,
    /// The greedy baseline.
    Greedy,
    /// Random `ā`, `n̄` from the weighted construction, zero elsewhere.
    Construct,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrimesConfig {
    pub limit: u64,
}

impl Default for PrimesConfig {
    fn default() -> Self {
        PrimesConfig { limit: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionConfig {
    pub x: f64,
    pub c: f64,
    pub a: f64,
    pub b0: u64,
    pub overrides: ParamOverrides,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig { x: 1e6, c: 0.4, a: DEFAULT_A, b0: 1, overrides: ParamOverrides::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SieveConfig {
    pub classes: ClassChoice,
    /// Number of equal windows `[αy, βy]` in the short-interval table.
    pub windows: u32,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig { classes: ClassChoice::Zeros, windows: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightsConfig {
    pub kind: WeightKind,
    /// Tuple length; the derived `r` when absent.
    pub r: Option<usize>,
    pub theta: f64,
    /// Explicit shifts instead of the first `r` primes above `r`.
    pub tuple: Option<Vec<i64>>,
    pub q_sample_cap: usize,
}

impl Default for WeightsConfig {
    fn default() -> Self {
        WeightsConfig { kind: WeightKind::Maynard, r: None, theta: DEFAULT_THETA, tuple: None, q_sample_cap: 512 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstructConfig {
    pub eta: f64,
}

impl Default for ConstructConfig {
    fn default() -> Self {
        ConstructConfig { eta: DEFAULT_ETA }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoverConfig {
    pub n: usize,
    pub p_count: usize,
    pub m: Vec<usize>,
    pub profile: EdgeProfile,
    pub runs: u64,
    pub subset_fraction: f64,
    /// Relative tolerance on the median leftover fraction.
    pub tolerance: f64,
    pub subset_tolerance: f64,
}

impl Default for CoverConfig {
    fn default() -> Self {
        CoverConfig {
            n: 100_000,
            p_count: 10_000,
            m: vec![1, 2, 3],
            profile: EdgeProfile::Poisson,
            runs: 9,
            subset_fraction: 0.1,
            tolerance: 0.15,
            subset_tolerance: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaierConfig {
    pub classes: ClassChoice,
    pub k: usize,
    pub epsilon: f64,
    pub trials: u64,
    pub row_trials: u64,
    pub d: u32,
    pub budget_bits: u64,
    pub policy: PrimalityPolicy,
}

impl Default for MaierConfig {
    fn default() -> Self {
        MaierConfig {
            classes: ClassChoice::Construct,
            k: 2,
            epsilon: 0.05,
            trials: 2000,
            row_trials: 200,
            d: DEFAULT_D,
            budget_bits: DEFAULT_BUDGET_BITS,
            policy: PrimalityPolicy::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GkConfig {
    pub x: u64,
    pub k: usize,
}

impl Default for GkConfig {
    fn default() -> Self {
        GkConfig { x: 1_000_000, k: 1 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub certificate: Option<String>,
}

/// One experiment: a mode, a root seed and per-module parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub seed: u64,
    pub output: OutputConfig,
    pub primes: PrimesConfig,
    pub partition: PartitionConfig,
    pub sieve: SieveConfig,
    pub weights: WeightsConfig,
    pub construct: ConstructConfig,
    pub cover: CoverConfig,
    pub maier: MaierConfig,
    pub gk: GkConfig,
    pub verify: VerifyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::Sieve,
            seed: 0,
            output: OutputConfig::default(),
            primes: PrimesConfig::default(),
            partition: PartitionConfig::default(),
            sieve: SieveConfig::default(),
            weights: WeightsConfig::default(),
            construct: ConstructConfig::default(),
            cover: CoverConfig::default(),
            maier: MaierConfig::default(),
            gk: GkConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Desk-scale defaults for `mode`.
    ///
    /// The sieving modes use `x = 100`, `y = 300`, `S = {5, 7}`, `r = 2`;
    /// the Maier mode uses `x = 30`, `y = 120`, `S = {3, 5}`.
    pub fn toy(mode: Mode) -> Self {
        let mut cfg = ExperimentConfig { mode, ..Default::default() };
        cfg.partition = PartitionConfig {
            x: 100.0,
            c: 0.1,
            a: DEFAULT_A,
            b0: 1,
            overrides: ParamOverrides {
                y: Some(300.0),
                z: Some(10.0),
                r: Some(2),
                small_low: Some(3.0),
                small_high: Some(10.0),
                ..Default::default()
            },
        };
        cfg.sieve.classes = ClassChoice::Construct;
        cfg.weights.theta = 0.5;
        if mode == Mode::Maier {
            cfg.partition.x = 30.0;
            cfg.partition.overrides = ParamOverrides {
                y: Some(120.0),
                z: Some(5.0),
                r: Some(2),
                small_low: Some(2.0),
                small_high: Some(5.0),
                ..Default::default()
            };
        }
        cfg.primes.limit = 100_000;
        cfg.gk = GkConfig { x: 100, k: 2 };
        cfg.cover = CoverConfig { n: 20_000, p_count: 2_000, ..CoverConfig::default() };
        cfg
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn partial_file_fills_defaults() {
        let cfg = ExperimentConfig::from_toml(
            "mode = \"gk\"\nseed = 9\n[gk]\nx = 100\nk = 2\n[partition.overrides]\ny = 300.0\n",
        )
        .unwrap();
        assert_eq!(cfg.mode, Mode::Gk);
        assert_eq!(cfg.gk, GkConfig { x: 100, k: 2 });
        assert_eq!(cfg.partition.overrides.y, Some(300.0));
        assert_eq!(cfg.cover, CoverConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_toml("mode = \"gk\"\n[gk]\nxx = 1\n").is_err());
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e12f64..1e12, Just(0.1), Just(1e-300)]
    }

    proptest! {
        #[test]
        fn toml_round_trip(
            seed in 0u64..=i64::MAX as u64,
            x in finite(),
            y in proptest::option::of(finite()),
            r in proptest::option::of(1u32..100),
            m in proptest::collection::vec(1usize..10, 0..4),
            tuple in proptest::option::of(proptest::collection::vec(-50i64..50, 0..5)),
            eta in finite(),
            mode in prop_oneof![Just(Mode::Sieve), Just(Mode::Maier), Just(Mode::Verify)],
            dir in proptest::option::of("[a-z/]{1,12}"),
            rounds in 1u32..64,
        ) {
            let mut cfg = ExperimentConfig::toy(mode);
            cfg.seed = seed;
            cfg.partition.x = x;
            cfg.partition.overrides.y = y;
            cfg.partition.overrides.r = r;
            cfg.cover.m = m;
            cfg.weights.tuple = tuple;
            cfg.construct.eta = eta;
            cfg.output.dir = dir;
            cfg.maier.policy = PrimalityPolicy::Probabilistic { rounds };
            let text = cfg.to_toml().unwrap();
            prop_assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
        }
    }
}
