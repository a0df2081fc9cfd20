use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::substream;

/// Empirical form of the second-moment concentration bound.
///
/// Each group shares one `X` and holds pairs `(F(X, Y), F(X, Y′))` with
/// `Y, Y′` conditionally independent given `X`. From `α = E F` and
/// `E F(X,Y)F(X,Y′) = (1 + ε)α²`, Chebyshev gives
/// `P(|E[F | X] − α| > θ) ≤ εα²/θ²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub groups: usize,
    pub alpha: f64,
    pub second_moment: f64,
    pub epsilon: f64,
    pub theta: f64,
    pub violations: usize,
    pub violation_frequency: f64,
    /// `εα²/θ²`.
    pub chebyshev_bound: f64,
    /// True when every observation is equal.
    pub degenerate: bool,
}

impl ConcentrationReport {
    /// `violation_frequency ≤ slack · bound`; degenerate input always passes.
    pub fn within(&self, slack: f64) -> bool {
        self.degenerate || self.violation_frequency <= slack * self.chebyshev_bound
    }
}

pub fn concentration_check(groups: &[Vec<(f64, f64)>], theta: f64) -> Result<ConcentrationReport> {
    if groups.len() < 2 || groups.iter().any(|g| g.is_empty()) {
        return Err(Error::InvalidParameter("need at least two non-empty groups".into()));
    }
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter(format!("theta must be positive, got {theta}")));
    }
    let count: usize = groups.iter().map(Vec::len).sum();
    let alpha = groups
        .iter()
        .flatten()
        .map(|&(a, b)| a + b)
        .sum::<f64>()
        / (2 * count) as f64;
    let second_moment = groups.iter().flatten().map(|&(a, b)| a * b).sum::<f64>() / count as f64;
    let first = groups[0][0].0;
    let degenerate = groups.iter().flatten().all(|&(a, b)| a == first && b == first);
    let epsilon = if degenerate || alpha == 0.0 {
        0.0
    } else {
        (second_moment / (alpha * alpha) - 1.0).max(0.0)
    };
    let violations = groups
        .iter()
        .filter(|g| {
            let mean = g.iter().map(|&(a, b)| a + b).sum::<f64>() / (2 * g.len()) as f64;
            (mean - alpha).abs() > theta
        })
        .count();
    let bound = if theta.is_infinite() { 0.0 } else { epsilon * alpha * alpha / (theta * theta) };
    Ok(ConcentrationReport {
        groups: groups.len(),
        alpha,
        second_moment,
        epsilon,
        theta,
        violations,
        violation_frequency: violations as f64 / groups.len() as f64,
        chebyshev_bound: bound,
        degenerate,
    })
}

/// Bernoulli groups with `E F = alpha` and `E F F′ = (1 + epsilon)α²`.
///
/// Each group draws `π_X = α(1 ± √ε)` with equal odds and then `per_group`
/// independent pairs of Bernoulli(`π_X`) outcomes.
pub fn bernoulli_groups(alpha: f64, epsilon: f64, groups: usize, per_group: usize, seed: u64) -> Result<Vec<Vec<(f64, f64)>>> {
    let spread = alpha * epsilon.sqrt();
    if !(alpha - spread >= 0.0 && alpha + spread <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "α(1 ± √ε) must lie in [0, 1]; α = {alpha}, ε = {epsilon}"
        )));
    }
    Ok((0..groups as u64)
        .map(|g| {
            let mut rng = substream(seed, "concentration", g);
            let pi = if rng.random::<bool>() { alpha + spread } else { alpha - spread };
            (0..per_group)
                .map(|_| {
                    let a = f64::from(u8::from(rng.random_bool(pi)));
                    let b = f64::from(u8::from(rng.random_bool(pi)));
                    (a, b)
                })
                .collect()
        })
        .collect())
}
