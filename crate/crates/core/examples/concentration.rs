//! Second-moment concentration on a synthetic Bernoulli family.

use gapchain::harness::{bernoulli_groups, concentration_check};

fn main() -> gapchain::Result<()> {
    let (alpha, epsilon) = (0.3, 0.04);
    let groups = bernoulli_groups(alpha, epsilon, 5000, 200, 11)?;
    for theta in [0.02, 0.05, 0.1, 0.15] {
        let rep = concentration_check(&groups, theta)?;
        println!(
            "theta {theta:.2}: violations {:.4}, Chebyshev {:.4}, empirical alpha {:.4}, epsilon {:.4}",
            rep.violation_frequency, rep.chebyshev_bound, rep.alpha, rep.epsilon
        );
    }
    Ok(())
}
