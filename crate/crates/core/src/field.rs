//! Exact arithmetic in GF(q) for prime powers q ≤ 2^16.
//!
//! Elements are stored as canonical codes in `0..q`: the residue itself
//! for prime fields, and for extension fields the base-p digits of the
//! coefficient vector of the reduced polynomial (digit i = coefficient
//! of x^i). Multiplication and inversion go through log/antilog tables
//! built once at construction from the smallest generator; the q cap
//! keeps those tables small. All state is immutable after construction,
//! so a `Field` can be shared freely across threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field size.
pub const MAX_Q: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime power in the supported range 2..={MAX_Q}")]
    NotPrimePower(u64),
    #[error("division by zero")]
    DivisionByZero,
}

/// A concrete GF(q) = GF(p^m) with its element tables.
#[derive(Clone, Serialize, Deserialize)]
pub struct Field {
    p: u32,
    m: u32,
    q: u32,
    /// Coefficients c_0..c_m of the monic irreducible modulus
    /// (length m+1); empty for prime fields.
    modulus: Vec<u32>,
    /// log[a] = discrete log of a base the chosen generator, a in 1..q.
    /// Entry 0 is unused.
    log: Vec<u32>,
    /// exp[i] = generator^i for i in 0..q-1.
    exp: Vec<u32>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}
impl Eq for Field {}

impl Field {
    /// Builds GF(q). For extension fields the modulus is the monic
    /// irreducible polynomial of degree m over GF(p) whose coefficient
    /// string (read from the leading term down) is lexicographically
    /// smallest, so the construction is deterministic across runs.
    pub fn new(q: u64) -> Result<Field, FieldError> {
        if !(2..=MAX_Q).contains(&q) {
            return Err(FieldError::NotPrimePower(q));
        }
        let (p, m) = prime_power_split(q).ok_or(FieldError::NotPrimePower(q))?;
        let q = q as u32;
        let modulus = if m == 1 {
            Vec::new()
        } else {
            smallest_irreducible(p, m)
        };
        let mut field = Field {
            p,
            m,
            q,
            modulus,
            log: Vec::new(),
            exp: Vec::new(),
        };
        field.build_tables();
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn extension_degree(&self) -> u32 {
        self.m
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    /// Modulus coefficients c_0..c_m; empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }

    /// Nonzero elements in canonical order.
    pub fn units(&self) -> impl Iterator<Item = u32> {
        1..self.q
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.q && b < self.q);
        if self.p == 2 {
            return a ^ b;
        }
        if self.m == 1 {
            let s = a + b;
            return if s >= self.q { s - self.q } else { s };
        }
        self.digitwise(a, b, |x, y| {
            let s = x + y;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        })
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        debug_assert!(a < self.q);
        if self.p == 2 {
            return a;
        }
        if self.m == 1 {
            return if a == 0 { 0 } else { self.q - a };
        }
        self.map_digits(a, |x| if x == 0 { 0 } else { self.p - x })
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.q && b < self.q);
        if a == 0 || b == 0 {
            return 0;
        }
        let order = self.q - 1;
        let i = self.log[a as usize] + self.log[b as usize];
        let i = if i >= order { i - order } else { i };
        self.exp[i as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32, FieldError> {
        debug_assert!(a < self.q);
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let order = self.q - 1;
        let i = (order - self.log[a as usize]) % order;
        Ok(self.exp[i as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        debug_assert!(a < self.q);
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let order = u64::from(self.q - 1);
        let i = (u64::from(self.log[a as usize]) * (e % order)) % order;
        self.exp[i as usize]
    }

    /// Element from an unsigned integer reduced into the prime subfield.
    /// Handy for small literals; for p = 2 this is `v mod 2`.
    pub fn from_int(&self, v: u64) -> u32 {
        (v % u64::from(self.p)) as u32
    }

    fn digitwise(&self, a: u32, b: u32, op: impl Fn(u32, u32) -> u32) -> u32 {
        let mut a = a;
        let mut b = b;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.m {
            out += op(a % self.p, b % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    fn map_digits(&self, a: u32, op: impl Fn(u32) -> u32) -> u32 {
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.m {
            out += op(a % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    /// Raw polynomial product reduced by the modulus; used only to
    /// bootstrap the tables.
    fn raw_mul(&self, a: u32, b: u32) -> u32 {
        if self.m == 1 {
            return ((u64::from(a) * u64::from(b)) % u64::from(self.p)) as u32;
        }
        let da = digits(a, self.p, self.m);
        let db = digits(b, self.p, self.m);
        let mut prod = vec![0u32; 2 * self.m as usize - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = ((u64::from(prod[i + j]) + u64::from(x) * u64::from(y))
                    % u64::from(self.p)) as u32;
            }
        }
        // reduce mod the monic modulus
        for i in (self.m as usize..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for (j, &mj) in self.modulus.iter().enumerate().take(self.m as usize) {
                let k = i - self.m as usize + j;
                let sub = (u64::from(c) * u64::from(mj)) % u64::from(self.p);
                prod[k] = ((u64::from(prod[k]) + u64::from(self.p) - sub as u64)
                    % u64::from(self.p)) as u32;
            }
        }
        undigits(&prod[..self.m as usize], self.p)
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let order = q - 1;
        if order == 1 {
            self.exp = vec![1];
            self.log = vec![0, 0];
            return;
        }
        // smallest generator by canonical code
        let mut exp = vec![0u32; order];
        'candidates: for g in 2..self.q {
            let mut x = 1u32;
            for (i, slot) in exp.iter_mut().enumerate() {
                *slot = x;
                x = self.raw_mul(x, g);
                if x == 1 && i + 1 < order {
                    continue 'candidates; // order too small
                }
            }
            debug_assert_eq!(x, 1);
            let mut log = vec![0u32; q];
            for (i, &v) in exp.iter().enumerate() {
                log[v as usize] = i as u32;
            }
            self.exp = exp;
            self.log = log;
            return;
        }
        unreachable!("every finite field has a generator");
    }
}

/// Splits q into (p, m) with q = p^m, p prime; None if impossible.
fn prime_power_split(q: u64) -> Option<(u32, u32)> {
    let mut p = 0u64;
    let mut d = 2u64;
    while d * d <= q {
        if q.is_multiple_of(d) {
            p = d;
            break;
        }
        d += 1;
    }
    if p == 0 {
        p = q; // q itself is prime
    }
    let mut rest = q;
    let mut m = 0u32;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    if rest == 1 {
        Some((p as u32, m))
    } else {
        None
    }
}

fn digits(v: u32, p: u32, m: u32) -> Vec<u32> {
    let mut v = v;
    let mut out = Vec::with_capacity(m as usize);
    for _ in 0..m {
        out.push(v % p);
        v /= p;
    }
    out
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    let mut out = 0;
    for &d in ds.iter().rev() {
        out = out * p + d;
    }
    out
}

/// The monic irreducible polynomial of degree m over GF(p) with the
/// smallest coefficient string, found by trial division against every
/// monic polynomial of degree at most m/2.
fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
    let m = m as usize;
    let pu = u64::from(p);
    let count = pu.pow(m as u32); // lower coefficients c_0..c_{m-1}
    for code in 0..count {
        let mut poly: Vec<u32> = (0..m)
            .map(|i| ((code / pu.pow(i as u32)) % pu) as u32)
            .collect();
        poly.push(1); // monic
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over GF(p)");
}

/// Irreducibility by trial division: no monic divisor of degree
/// 1..=deg/2 divides the polynomial.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    if deg == 1 {
        return true;
    }
    let pu = u64::from(p);
    for d in 1..=deg / 2 {
        let count = pu.pow(d as u32);
        for code in 0..count {
            let mut div: Vec<u32> = (0..d)
                .map(|i| ((code / pu.pow(i as u32)) % pu) as u32)
                .collect();
            div.push(1);
            if poly_rem_is_zero(poly, &div, p) {
                return false;
            }
        }
    }
    true
}

/// Whether `divisor` (monic) divides `poly` over GF(p).
fn poly_rem_is_zero(poly: &[u32], divisor: &[u32], p: u32) -> bool {
    let pu = u64::from(p);
    let mut rem: Vec<u64> = poly.iter().map(|&c| u64::from(c)).collect();
    let dd = divisor.len() - 1;
    for i in (dd..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        rem[i] = 0;
        for (j, &mj) in divisor.iter().enumerate().take(dd) {
            let k = i - dd + j;
            rem[k] = (rem[k] + pu - (c * u64::from(mj)) % pu) % pu;
        }
    }
    rem.iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn gf2_is_prime_field() {
        let f = Field::new(2).unwrap();
        assert_eq!(f.p(), 2);
        assert_eq!(f.extension_degree(), 1);
        assert!(f.modulus().is_empty());
    }

    #[test]
    fn gf4_modulus_is_the_unique_irreducible_quadratic() {
        // Oracle: enumerate all monic quadratics over GF(2) and keep the
        // ones with no root and no factorization; only x^2+x+1 survives.
        let mut irreducible = Vec::new();
        for c0 in 0..2u32 {
            for c1 in 0..2u32 {
                let poly = [c0, c1, 1];
                let has_root = (0..2u32).any(|x| (c0 + c1 * x + x * x) % 2 == 0);
                if !has_root {
                    irreducible.push(poly.to_vec());
                }
            }
        }
        assert_eq!(irreducible, vec![vec![1, 1, 1]]);

        let f = Field::new(4).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn six_is_rejected() {
        assert_eq!(Field::new(6), Err(FieldError::NotPrimePower(6)));
        assert_eq!(Field::new(12), Err(FieldError::NotPrimePower(12)));
        assert_eq!(Field::new(1), Err(FieldError::NotPrimePower(1)));
        assert!(Field::new(1 << 17).is_err());
    }

    #[test]
    fn gf5_products() {
        let f = Field::new(5).unwrap();
        assert_eq!(f.mul(3, 4), 2); // 12 mod 5
        assert_eq!(f.add(3, 4), 2);
        assert_eq!(f.sub(1, 3), 3);
    }

    #[test]
    fn gf4_alpha_squared() {
        // alpha = x has code 2; alpha^2 = alpha + 1 has code 3.
        let f = Field::new(4).unwrap();
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.add(2, 1), 3);
    }

    #[test]
    fn inverses_multiply_to_one() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 16] {
            let f = Field::new(q).unwrap();
            for a in f.units() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "q={q} a={a}");
            }
            assert_eq!(f.inv(0), Err(FieldError::DivisionByZero));
        }
    }

    #[test]
    fn field_axioms_hold_on_random_triples() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 16] {
            let f = Field::new(q).unwrap();
            let mut rng = crate::seeds::rng(0xf1e1d, "field-axioms", q);
            for _ in 0..10_000 {
                let a = rng.random_range(0..f.q());
                let b = rng.random_range(0..f.q());
                let c = rng.random_range(0..f.q());
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.add(a, f.neg(a)), 0);
                assert_eq!(f.sub(f.add(a, b), b), a);
                if b != 0 {
                    assert_eq!(f.mul(f.div(a, b).unwrap(), b), a);
                }
            }
        }
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        for q in [3u64, 8, 9] {
            let f = Field::new(q).unwrap();
            for a in f.elements() {
                let mut acc = 1;
                for e in 0..12u64 {
                    assert_eq!(f.pow(a, e), acc, "q={q} a={a} e={e}");
                    acc = f.mul(acc, a);
                }
            }
        }
    }

    #[test]
    fn gf8_modulus_is_smallest() {
        // Over GF(2) the monic cubics without roots are x^3+x+1 (code 11)
        // and x^3+x^2+1 (code 13); the smaller one must be chosen.
        let f = Field::new(8).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn gf9_modulus() {
        // x^2+1 has no root mod 3, and its coefficient string is minimal.
        let f = Field::new(9).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
    }
}
