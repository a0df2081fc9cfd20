//! Greedy Erdős–Rankin baseline.

use super::residue::ResidueSystem;
use super::sifted::sift_interval;
use crate::error::{Error, Result};
use crate::partition::PrimePartition;

/// Deterministic greedy residue system on `(x, y]`.
///
/// Primes `≤ x` outside `S ∪ P ∪ medium` (and not `B0`) take class 0. Then
/// `S`, the medium primes and `P` are visited in that order, ascending, each
/// taking the class that removes the most current survivors (ties go to the
/// smallest class).
pub fn greedy_rankin(partition: &PrimePartition, medium_primes: &[u64]) -> Result<ResidueSystem> {
    let in_sp = |m: &u64| partition.s.contains(m) || partition.p.binary_search(m).is_ok();
    if let Some(m) = medium_primes.iter().find(|m| in_sp(m)) {
        return Err(Error::InvalidParameter(format!("medium prime {m} is already in S ∪ P")));
    }
    if let Some(m) = medium_primes.iter().find(|&&m| m > partition.x || m == partition.b0) {
        return Err(Error::InvalidParameter(format!("medium prime {m} is above x or is B0")));
    }
    let mut system = ResidueSystem::new(partition.b0);
    for p in partition.primes_to_x() {
        if !in_sp(&p) && !medium_primes.contains(&p) {
            system.insert(p, 0)?;
        }
    }
    let mut survivors = sift_interval(partition.x, partition.y, &system)?.to_vec();
    let order = partition.s.iter().chain(medium_primes).chain(&partition.p);
    for &p in order {
        let class = greedy_class(&survivors, p);
        survivors.retain(|&n| n % p != class);
        system.insert(p, class as i64)?;
    }
    Ok(system)
}

/// The class mod `p` holding the most of `survivors`; ties go to the smallest.
pub(crate) fn greedy_class(survivors: &[u64], p: u64) -> u64 {
    let mut counts = vec![0u64; p as usize];
    for &n in survivors {
        counts[(n % p) as usize] += 1;
    }
    let best = counts.iter().copied().max().unwrap_or(0);
    counts.iter().position(|&c| c == best).unwrap_or(0) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::sieve_primes;
    use crate::partition::{build_partition, derive_parameters, ParamOverrides};
    use rand::Rng;

    #[test]
    fn single_prime_removes_the_largest_class() {
        for (lo, count, p) in [(0u64, 100u64, 7u64), (13, 50, 11), (5, 30, 31), (1000, 64, 2)] {
            let survivors: Vec<u64> = (lo + 1..=lo + count).collect();
            let class = greedy_class(&survivors, p);
            let removed = survivors.iter().filter(|&&n| n % p == class).count() as u64;
            assert_eq!(removed, count.div_ceil(p));
            // smallest class among the maximal ones
            let first_max = (0..p)
                .find(|c| survivors.iter().filter(|&&n| n % p == *c).count() as u64 == removed)
                .unwrap();
            assert_eq!(class, first_max);
        }
    }

    #[test]
    fn greedy_beats_all_zero_on_random_toys() {
        let mut rng = crate::seed::root(2024);
        for _ in 0..20 {
            let x = rng.random_range(60..200) as f64;
            let y = x * rng.random_range(2.0..5.0);
            let high = rng.random_range(5.0..(x / 4.0));
            let over = ParamOverrides {
                y: Some(y),
                z: Some(high),
                small_low: Some(2.0),
                small_high: Some(high),
                ..Default::default()
            };
            let params = derive_parameters(x, 0.1, 4.0, &over).unwrap();
            let part = build_partition(&params, 1).unwrap();
            let medium: Vec<u64> = sieve_primes(part.x / 2)
                .iter()
                .filter(|&m| m as f64 > high)
                .collect();
            let greedy = greedy_rankin(&part, &medium).unwrap();
            let mut zeros = ResidueSystem::new(1);
            for p in part.primes_to_x() {
                zeros.insert(p, 0).unwrap();
            }
            let g = sift_interval(part.x, part.y, &greedy).unwrap().len();
            let z = sift_interval(part.x, part.y, &zeros).unwrap().len();
            assert!(g <= z, "x={x} y={y}: greedy {g} vs zeros {z}");
            // deterministic
            assert_eq!(greedy, greedy_rankin(&part, &medium).unwrap());
        }
    }

    #[test]
    fn rejects_overlapping_medium_primes() {
        let over = ParamOverrides {
            y: Some(300.0),
            z: Some(10.0),
            small_low: Some(3.0),
            small_high: Some(10.0),
            ..Default::default()
        };
        let part = build_partition(&derive_parameters(100.0, 0.1, 4.0, &over).unwrap(), 1).unwrap();
        assert!(greedy_rankin(&part, &[7]).is_err());
        assert!(greedy_rankin(&part, &[53]).is_err());
        assert!(greedy_rankin(&part, &[101]).is_err());
    }
}
