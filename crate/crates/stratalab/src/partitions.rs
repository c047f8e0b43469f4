//! Partitions into distinct parts.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Parts in strictly decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DistinctPartition {
    parts: Vec<u64>,
}

impl DistinctPartition {
    /// Fails unless `parts` is strictly decreasing and positive.
    pub fn new(parts: Vec<u64>) -> Option<Self> {
        let ok = parts.windows(2).all(|w| w[0] > w[1]) && parts.last().is_none_or(|&x| x > 0);
        ok.then_some(Self { parts })
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn total(&self) -> u64 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

impl fmt::Display for DistinctPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All distinct partitions of `n`, largest first part first.
pub fn enumerate_distinct(n: u64) -> Vec<DistinctPartition> {
    fn go(rest: u64, max: u64, prefix: &mut Vec<u64>, out: &mut Vec<DistinctPartition>) {
        if rest == 0 {
            out.push(DistinctPartition { parts: prefix.clone() });
            return;
        }
        for part in (1..=max.min(rest)).rev() {
            // part, part-1, ..., 1 is the most the remaining parts can reach
            if part * (part + 1) / 2 < rest {
                break;
            }
            prefix.push(part);
            go(rest - part, part - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// `p(0..=n)` by Euler's pentagonal recurrence.
fn partition_numbers(n: usize) -> Vec<BigUint> {
    let mut p = vec![BigUint::zero(); n + 1];
    p[0] = BigUint::one();
    for m in 1..=n {
        let mut plus = BigUint::zero();
        let mut minus = BigUint::zero();
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let target = if k % 2 == 1 { &mut plus } else { &mut minus };
            *target += &p[m - g1];
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= m {
                *target += &p[m - g2];
            }
        }
        p[m] = plus - minus;
    }
    p
}

/// Number of distinct partitions of `n`, via
/// `q(n) = sum_k (-1)^k p(n - k(3k - 1))` over all integers `k`.
pub fn count_distinct(n: u64) -> BigUint {
    let n = n as usize;
    let p = partition_numbers(n);
    let mut plus = p[n].clone();
    let mut minus = BigUint::zero();
    for k in 1.. {
        let g1 = k * (3 * k - 1);
        if g1 > n {
            break;
        }
        let target = if k % 2 == 1 { &mut minus } else { &mut plus };
        *target += &p[n - g1];
        let g2 = k * (3 * k + 1);
        if g2 <= n {
            *target += &p[n - g2];
        }
    }
    plus - minus
}

/// `exp(pi sqrt(n / 3))`, the leading growth of [`count_distinct`].
pub fn growth_estimate(n: u64) -> f64 {
    (std::f64::consts::PI * (n as f64 / 3.0).sqrt()).exp()
}
