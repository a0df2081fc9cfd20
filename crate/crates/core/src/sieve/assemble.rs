use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::residue::{ResidueSystem, SmallClassVector};
use super::sifted::SievedSet;
use crate::error::{Error, Result};
use crate::math::{is_prime_u64, is_smooth};
use crate::partition::PrimePartition;

/// Full system over the primes `≤ x` other than `B0`: `ā` on `S`, `n̄` on `P`,
/// class 0 everywhere else.
pub fn assemble_full_system(
    abar: &SmallClassVector,
    nbar: &BTreeMap<u64, i64>,
    partition: &PrimePartition,
) -> Result<ResidueSystem> {
    let given: Vec<u64> = abar.primes().collect();
    if given != partition.s {
        let missing: Vec<u64> = partition.s.iter().copied().filter(|s| !given.contains(s)).collect();
        if !missing.is_empty() {
            return Err(Error::MissingClasses(missing));
        }
        let extra: Vec<u64> = given.into_iter().filter(|s| !partition.s.contains(s)).collect();
        return Err(Error::UnexpectedClasses(extra));
    }
    let missing: Vec<u64> = partition.p.iter().copied().filter(|p| !nbar.contains_key(p)).collect();
    if !missing.is_empty() {
        return Err(Error::MissingClasses(missing));
    }
    let extra: Vec<u64> = nbar
        .keys()
        .copied()
        .filter(|p| partition.p.binary_search(p).is_err())
        .collect();
    if !extra.is_empty() {
        return Err(Error::UnexpectedClasses(extra));
    }
    let small: BTreeMap<u64, u64> = abar.classes().iter().copied().collect();
    let mut system = ResidueSystem::new(partition.b0);
    for p in partition.primes_to_x() {
        let class = if let Some(&a) = small.get(&p) {
            a as i64
        } else if let Some(&n) = nbar.get(&p) {
            n
        } else {
            0
        };
        system.insert(p, class)?;
    }
    Ok(system)
}

/// Split of a sifted set into primes of `Q` and the residual `R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub t_count: u64,
    pub q_prime_count: u64,
    pub residual: Vec<u64>,
    /// Members of `R` that are `z`-smooth times a power of `B0`.
    pub smooth_times_b0: u64,
    /// The other members of `R`; nonempty only at toy sizes, where a prime
    /// of `P` times a small prime fits below `y`.
    pub unstructured: Vec<u64>,
    pub u: f64,
    /// `log x · y · e^{−u log u}`.
    pub bound: f64,
}

impl ResidualReport {
    pub fn residual_count(&self) -> u64 {
        self.residual.len() as u64
    }
}

/// Splits `T` into `Q`-primes and the residual set, re-checking every member
/// of `T` against the system that produced it.
pub fn residual_smooth_set(
    t: &SievedSet,
    partition: &PrimePartition,
    system: &ResidueSystem,
) -> Result<ResidualReport> {
    let mut residual = Vec::new();
    let mut unstructured = Vec::new();
    let mut q_primes = 0u64;
    let mut smooth = 0u64;
    let z = partition.small_high.max(2);
    for n in t.iter() {
        if let Some(p) = system.hit_by(i128::from(n)) {
            return Err(Error::Dichotomy(format!("{n} lies in the class of {p} yet survived")));
        }
        if partition.q.binary_search(&n).is_ok() {
            q_primes += 1;
            continue;
        }
        if n > partition.x && n <= partition.y && is_prime_u64(n) {
            return Err(Error::Dichotomy(format!("prime {n} in (x, y] is missing from Q")));
        }
        residual.push(n);
        let mut m = n;
        if partition.b0 > 1 {
            while m % partition.b0 == 0 {
                m /= partition.b0;
            }
        }
        if is_smooth(m, z) {
            smooth += 1;
        } else {
            unstructured.push(n);
        }
    }
    let x = partition.x.max(2) as f64;
    let y = partition.y as f64;
    let u = y.ln() / (z as f64).ln();
    let main = if u <= 1.0 { 1.0 } else { (-u * u.ln()).exp() };
    Ok(ResidualReport {
        t_count: t.len(),
        q_prime_count: q_primes,
        residual,
        smooth_times_b0: smooth,
        unstructured,
        u,
        bound: x.ln() * y * main,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{build_partition, derive_parameters, ParamOverrides};
    use crate::sieve::sift_interval;

    fn partition(x: f64, y: f64, window: (f64, f64), b0: u64) -> PrimePartition {
        let over = ParamOverrides {
            y: Some(y),
            z: Some(window.1.max(2.0)),
            small_low: Some(window.0),
            small_high: Some(window.1),
            ..Default::default()
        };
        let params = derive_parameters(x, 0.1, 4.0, &over).unwrap();
        build_partition(&params, b0).unwrap()
    }

    fn zero_nbar(part: &PrimePartition) -> BTreeMap<u64, i64> {
        part.p.iter().map(|&p| (p, 0)).collect()
    }

    #[test]
    fn assembled_size_and_zero_classes() {
        let part = partition(100.0, 300.0, (3.0, 10.0), 1);
        let abar = SmallClassVector::new(vec![(5, 1), (7, 3)]).unwrap();
        let sys = assemble_full_system(&abar, &zero_nbar(&part), &part).unwrap();
        assert_eq!(sys.len(), 25);
        assert_eq!(sys.class(5), Some(1));
        assert_eq!(sys.class(3), Some(0));
        assert_eq!(sys.class(53), Some(0));
        // assembling twice gives the same mapping
        let again = assemble_full_system(&abar, &zero_nbar(&part), &part).unwrap();
        assert_eq!(sys, again);

        let part53 = partition(100.0, 300.0, (3.0, 10.0), 53);
        let sys53 = assemble_full_system(&abar, &zero_nbar(&part53), &part53).unwrap();
        assert_eq!(sys53.len(), 24);
    }

    #[test]
    fn all_zero_nbar_survivors_match_brute_force() {
        let part = partition(100.0, 300.0, (3.0, 10.0), 1);
        let abar = SmallClassVector::new(vec![(5, 2), (7, 6)]).unwrap();
        let sys = assemble_full_system(&abar, &zero_nbar(&part), &part).unwrap();
        let t = sift_interval(100, 300, &sys).unwrap();
        let brute: Vec<u64> = (101..=300u64)
            .filter(|&n| {
                let coprime_rest = part
                    .primes_to_x()
                    .iter()
                    .filter(|&&p| p != 5 && p != 7)
                    .all(|&p| n % p != 0);
                coprime_rest && n % 5 != 2 && n % 7 != 6
            })
            .collect();
        assert_eq!(t.to_vec(), brute);
    }

    #[test]
    fn missing_and_extra_classes() {
        let part = partition(100.0, 300.0, (3.0, 10.0), 1);
        let abar = SmallClassVector::new(vec![(5, 1), (7, 3)]).unwrap();
        let mut nbar = zero_nbar(&part);
        nbar.remove(&59);
        nbar.remove(&83);
        match assemble_full_system(&abar, &nbar, &part) {
            Err(Error::MissingClasses(v)) => assert_eq!(v, vec![59, 83]),
            other => panic!("unexpected {other:?}"),
        }
        let mut nbar = zero_nbar(&part);
        nbar.insert(101, 0);
        assert!(matches!(
            assemble_full_system(&abar, &nbar, &part),
            Err(Error::UnexpectedClasses(_))
        ));
        let short = SmallClassVector::new(vec![(5, 1)]).unwrap();
        assert!(matches!(
            assemble_full_system(&short, &zero_nbar(&part), &part),
            Err(Error::MissingClasses(_))
        ));
    }

    #[test]
    fn residual_is_empty_for_the_all_zero_system() {
        let part = partition(10.0, 50.0, (2.0, 2.0), 1);
        let sys = assemble_full_system(&SmallClassVector::default(), &zero_nbar(&part), &part).unwrap();
        let t = sift_interval(10, 50, &sys).unwrap();
        assert_eq!(t.len(), 11);
        let rep = residual_smooth_set(&t, &part, &sys).unwrap();
        assert!(rep.residual.is_empty());
        assert_eq!(rep.q_prime_count, 11);
    }

    #[test]
    fn excluded_prime_powers_land_in_the_residual() {
        let part = partition(10.0, 50.0, (2.0, 2.0), 7);
        let sys = assemble_full_system(&SmallClassVector::default(), &zero_nbar(&part), &part).unwrap();
        let t = sift_interval(10, 50, &sys).unwrap();
        assert!(t.contains(49));
        let rep = residual_smooth_set(&t, &part, &sys).unwrap();
        assert_eq!(rep.residual, vec![49]);
        assert_eq!(rep.smooth_times_b0, 1);
        assert_eq!(rep.residual_count() + rep.q_prime_count, rep.t_count);
    }

    #[test]
    fn residual_partition_of_t_on_random_systems() {
        let part = partition(100.0, 300.0, (3.0, 10.0), 1);
        for seed in 0..10i64 {
            let abar = SmallClassVector::new(vec![(5, seed), (7, 3 * seed)]).unwrap();
            let nbar = part.p.iter().map(|&p| (p, (p as i64 * seed) % 17)).collect();
            let sys = assemble_full_system(&abar, &nbar, &part).unwrap();
            let t = sift_interval(100, 300, &sys).unwrap();
            let rep = residual_smooth_set(&t, &part, &sys).unwrap();
            assert_eq!(rep.residual_count() + rep.q_prime_count, rep.t_count);
            assert_eq!(
                rep.smooth_times_b0 + rep.unstructured.len() as u64,
                rep.residual_count()
            );
        }
    }

    #[test]
    fn tampered_set_is_a_hard_error() {
        let part = partition(10.0, 50.0, (2.0, 2.0), 1);
        let sys = assemble_full_system(&SmallClassVector::default(), &zero_nbar(&part), &part).unwrap();
        let t = SievedSet::from_members(10, 50, [11, 12, 13]).unwrap();
        assert!(matches!(residual_smooth_set(&t, &part, &sys), Err(Error::Dichotomy(_))));
    }
}
