use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rand::Rng;

use crate::error::{Error, Result};
use crate::math::{crt_combine_u64, random_below, BigNat};
use crate::partition::PrimePartition;
use crate::sieve::{ResidueSystem, SievedSet};

pub const DEFAULT_D: u32 = 1;
/// Largest bit length allowed for `Z·P = P^{D+1}`.
pub const DEFAULT_BUDGET_BITS: u64 = 4096;
/// Non-survivors checked against `gcd(m + t, P) > 1` when a frame is built.
const SPOT_CHECKS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct MaierFrame {
    pub x: u64,
    pub y: u64,
    pub b0: u64,
    /// `P(x)/B0`.
    pub p: BigNat,
    /// CRT offset in `[0, P)` with `m ≡ −a_p (mod p)`.
    pub m: BigNat,
    pub d: u32,
    /// Rows are drawn from `z ∈ [1, Z]` with `Z = P^D`.
    pub z_bound: BigNat,
    pub system: ResidueSystem,
}

impl MaierFrame {
    /// `zP + m + t`.
    pub fn row_value(&self, z: &BigUint, t: u64) -> BigUint {
        z * self.p.as_biguint() + self.m.as_biguint() + t
    }

    /// Uniform `z ∈ [1, Z]`.
    pub fn sample_z<R: Rng + ?Sized>(&self, rng: &mut R) -> BigUint {
        random_below(rng, self.z_bound.as_biguint()) + 1u32
    }

    /// Sieving prime `p ≤ x` dividing every `zP + m + t`, if `t` is a non-survivor.
    pub fn shared_factor(&self, t: u64) -> Option<u64> {
        self.system.hit_by(i128::from(t))
    }
}

/// Builds `P` and `m` for a full residue system over the primes `≤ x` except `B0`.
///
/// `t` is the survivor set of `(x, y]`; up to a thousand non-survivors are
/// spot-checked for `gcd(m + t, P) > 1`.
pub fn assemble_frame(
    system: &ResidueSystem,
    partition: &PrimePartition,
    t: &SievedSet,
    d: u32,
    budget_bits: u64,
) -> Result<MaierFrame> {
    if d == 0 {
        return Err(Error::InvalidParameter("D must be ≥ 1".into()));
    }
    if system.excluded() != partition.b0 {
        return Err(Error::InvalidParameter("system and partition disagree on B0".into()));
    }
    let wanted = partition.primes_to_x();
    let have: Vec<u64> = system.primes().collect();
    let missing: Vec<u64> = wanted.iter().copied().filter(|p| system.class(*p).is_none()).collect();
    if !missing.is_empty() {
        return Err(Error::MissingClasses(missing));
    }
    let extra: Vec<u64> = have.iter().copied().filter(|p| wanted.binary_search(p).is_err()).collect();
    if !extra.is_empty() {
        return Err(Error::UnexpectedClasses(extra));
    }
    let congruences: Vec<(u64, u64)> = system.iter().map(|(p, a)| ((p - a) % p, p)).collect();
    let (m, p_big) = crt_combine_u64(&congruences)?;
    let bits = p_big.bits() * (u64::from(d) + 1);
    if bits > budget_bits {
        return Err(Error::BigIntBudget { bits, budget: budget_bits });
    }
    let z_bound = BigNat::new(num_traits::pow(p_big.as_biguint().clone(), d as usize));
    let frame = MaierFrame {
        x: partition.x,
        y: partition.y,
        b0: partition.b0,
        p: p_big,
        m,
        d,
        z_bound,
        system: system.clone(),
    };
    if t.lo() != partition.x || t.hi() != partition.y {
        return Err(Error::InvalidParameter("survivor set must cover (x, y]".into()));
    }
    let non_survivors: Vec<u64> = (t.lo() + 1..=t.hi()).filter(|&v| !t.contains(v)).collect();
    let stride = non_survivors.len().div_ceil(SPOT_CHECKS).max(1);
    for &v in non_survivors.iter().step_by(stride) {
        let g = (frame.m.as_biguint() + v).gcd(frame.p.as_biguint());
        if g.is_one() {
            return Err(Error::Dichotomy(format!("m + {v} is coprime to P although {v} is sieved out")));
        }
    }
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{build_partition, derive_parameters, ParamOverrides};
    use crate::sieve::sift_interval;

    fn partition(x: f64, y: f64) -> PrimePartition {
        let o = ParamOverrides {
            y: Some(y),
            z: Some(3.0),
            small_low: Some(2.0),
            small_high: Some(3.0),
            ..Default::default()
        };
        build_partition(&derive_parameters(x, 0.1, 4.0, &o).unwrap(), 1).unwrap()
    }

    fn zeros(part: &PrimePartition) -> ResidueSystem {
        let mut sys = ResidueSystem::new(part.b0);
        for p in part.primes_to_x() {
            sys.insert(p, 0).unwrap();
        }
        sys
    }

    #[test]
    fn all_zero_classes_give_zero_offset() {
        let part = partition(13.0, 60.0);
        let sys = zeros(&part);
        let t = sift_interval(13, 60, &sys).unwrap();
        let f = assemble_frame(&sys, &part, &t, 1, DEFAULT_BUDGET_BITS).unwrap();
        assert_eq!(f.p, BigNat::from(30030));
        assert_eq!(f.m, BigNat::from(0));
        assert_eq!(f.z_bound, BigNat::from(30030));
    }

    #[test]
    fn offset_matches_crt_example() {
        let part = partition(10.0, 40.0);
        let mut sys = ResidueSystem::new(1);
        for (p, a) in [(2, 1), (3, 2), (5, 3), (7, 4)] {
            sys.insert(p, a).unwrap();
        }
        let t = sift_interval(10, 40, &sys).unwrap();
        let f = assemble_frame(&sys, &part, &t, 1, DEFAULT_BUDGET_BITS).unwrap();
        assert_eq!((f.m.to_string().as_str(), f.p.to_string().as_str()), ("157", "210"));
    }

    #[test]
    fn frame_soundness_holds_everywhere() {
        let part = partition(30.0, 200.0);
        let mut sys = ResidueSystem::new(1);
        for (i, p) in part.primes_to_x().into_iter().enumerate() {
            sys.insert(p, (i as i64 * 7 + 3) % p as i64).unwrap();
        }
        let t = sift_interval(30, 200, &sys).unwrap();
        let f = assemble_frame(&sys, &part, &t, 1, DEFAULT_BUDGET_BITS).unwrap();
        assert!(f.m.as_biguint() < f.p.as_biguint());
        for v in 31..=200u64 {
            let g = (f.m.as_biguint() + v).gcd(f.p.as_biguint());
            assert_eq!(!g.is_one(), !t.contains(v), "t = {v}");
        }
    }

    #[test]
    fn missing_and_budget_errors() {
        let part = partition(30.0, 200.0);
        let mut sys = zeros(&part);
        let t = sift_interval(30, 200, &sys).unwrap();
        assert!(matches!(
            assemble_frame(&sys, &part, &t, 50, 256),
            Err(Error::BigIntBudget { .. })
        ));
        let mut partial = ResidueSystem::new(1);
        partial.insert(2, 0).unwrap();
        match assemble_frame(&partial, &part, &t, 1, DEFAULT_BUDGET_BITS) {
            Err(Error::MissingClasses(v)) => assert_eq!(v[0], 3),
            other => panic!("{other:?}"),
        }
        sys.insert(31, 0).unwrap();
        assert!(matches!(
            assemble_frame(&sys, &part, &t, 1, DEFAULT_BUDGET_BITS),
            Err(Error::UnexpectedClasses(_))
        ));
    }
}
