use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::math::for_each_prime;

pub const GK_LIMIT: u64 = 100_000_000;

/// `G_k(X)`: the largest `g` such that some `k` consecutive gaps between
/// primes `≤ X` are all at least `g`.
pub fn gk_direct(x: u64, k: usize) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be ≥ 1".into()));
    }
    if x > GK_LIMIT {
        return Err(Error::InvalidParameter(format!("X = {x} exceeds the scan limit {GK_LIMIT}")));
    }
    // sliding-window minimum over the last k gaps
    let mut window: VecDeque<(usize, u64)> = VecDeque::new();
    let mut prev: Option<u64> = None;
    let mut index = 0usize;
    let mut best: Option<u64> = None;
    for_each_prime(2, x, |p| {
        if let Some(q) = prev {
            let g = p - q;
            while window.back().is_some_and(|&(_, v)| v >= g) {
                window.pop_back();
            }
            window.push_back((index, g));
            if window.front().is_some_and(|&(i, _)| i + k <= index) {
                window.pop_front();
            }
            if index + 1 >= k {
                let m = window.front().unwrap().1;
                best = Some(best.map_or(m, |b| b.max(m)));
            }
            index += 1;
        }
        prev = Some(p);
    });
    best.ok_or(Error::TooSmall { limit: x, needed: k + 1 })
}
