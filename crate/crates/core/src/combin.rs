//! Exact combinatorics used for cost estimates and ball volumes.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Binomial coefficient, exact.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= BigUint::from(n - i);
        den *= BigUint::from(i + 1);
    }
    num / den
}

/// |B_E| = Σ_{i≤E} C(n,i)(q−1)^i, the number of words of weight ≤ E
/// in F_q^n, exact.
pub fn ball_volume(n: u64, q: u64, e: u64) -> BigUint {
    let mut total = BigUint::zero();
    let qm1 = BigUint::from(q - 1);
    for i in 0..=e.min(n) {
        total += binomial(n, i) * qm1.pow(i as u32);
    }
    total
}

/// Enumeration cost of a weight-exactly-`w` shell.
pub fn shell_volume(n: u64, q: u64, w: u64) -> BigUint {
    binomial(n, w) * BigUint::from(q - 1).pow(w as u32)
}

/// A cost that fits in the budget, or None.
pub fn within_budget(cost: &BigUint, cap: u64) -> Option<u64> {
    cost.to_u64().filter(|&c| c <= cap)
}

/// q^k as a BigUint.
pub fn power(q: u64, k: u64) -> BigUint {
    BigUint::from(q).pow(k as u32)
}

/// Lexicographic k-subsets of {0, .., n-1}.
pub struct Combinations {
    n: usize,
    k: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let cur = if k <= n {
            Some((0..k).collect())
        } else {
            None
        };
        Combinations { n, k, cur }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.cur.as_mut()?;
        let out = cur.clone();
        // advance
        let mut i = self.k;
        loop {
            if i == 0 {
                self.cur = None;
                return Some(out);
            }
            i -= 1;
            if cur[i] != i + self.n - self.k {
                break;
            }
        }
        cur[i] += 1;
        for j in i + 1..self.k {
            cur[j] = cur[j - 1] + 1;
        }
        Some(out)
    }
}

/// Lexicographic tuples in {0, .., base-1}^len, first coordinate most
/// significant.
pub struct Tuples {
    base: u64,
    cur: Option<Vec<u32>>,
}

impl Tuples {
    pub fn new(base: u64, len: usize) -> Self {
        Tuples {
            base,
            cur: Some(vec![0; len]),
        }
    }
}

impl Iterator for Tuples {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let cur = self.cur.as_mut()?;
        let out = cur.clone();
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.cur = None;
                return Some(out);
            }
            i -= 1;
            if u64::from(cur[i]) + 1 < self.base {
                cur[i] += 1;
                for v in cur.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                return Some(out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(10, 0), BigUint::from(1u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
    }

    #[test]
    fn ball_volume_edges() {
        assert_eq!(ball_volume(7, 3, 0), BigUint::from(1u32));
        assert_eq!(ball_volume(4, 2, 1), BigUint::from(5u32)); // 1 + 4
        assert_eq!(ball_volume(3, 2, 3), BigUint::from(8u32)); // whole space
        assert_eq!(ball_volume(4, 5, 4), BigUint::from(625u32));
    }

    #[test]
    fn combinations_order_and_count() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(Combinations::new(6, 3).count(), 20);
        assert_eq!(Combinations::new(3, 0).count(), 1);
    }

    #[test]
    fn tuple_odometer() {
        let all: Vec<_> = Tuples::new(3, 2).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[8], vec![2, 2]);
        assert_eq!(Tuples::new(5, 0).count(), 1);
    }
}
