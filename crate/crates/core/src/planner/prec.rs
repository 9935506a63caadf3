//! Thin arbitrary-precision layer over astro-float: a context carrying
//! the working precision plus the handful of operations the parameter
//! formulas need. Rounding to integers reports the distance to the
//! nearest integer boundary so callers can flag precision-sensitive
//! ceils and floors.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigUint;
use std::cell::RefCell;

const RM: RoundingMode = RoundingMode::ToEven;

pub struct Precision {
    digits: usize,
    bits: usize,
    consts: RefCell<Consts>,
}

impl Precision {
    /// Working precision in decimal digits (bits ≈ digits·log2(10),
    /// plus guard bits).
    pub fn with_digits(digits: usize) -> Precision {
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64;
        Precision {
            digits,
            bits,
            consts: RefCell::new(Consts::new().expect("constants cache")),
        }
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn int(&self, v: u64) -> BigFloat {
        BigFloat::from_u64(v, self.bits)
    }

    pub fn ratio(&self, num: u64, den: u64) -> BigFloat {
        assert!(den != 0);
        self.div(&self.int(num), &self.int(den))
    }

    pub fn big(&self, v: &BigUint) -> BigFloat {
        let mut cc = self.consts.borrow_mut();
        BigFloat::parse(&v.to_string(), Radix::Dec, self.bits, RM, &mut cc)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn ln(&self, x: &BigFloat) -> BigFloat {
        let mut cc = self.consts.borrow_mut();
        x.ln(self.bits, RM, &mut cc)
    }

    pub fn log2(&self, x: &BigFloat) -> BigFloat {
        let mut cc = self.consts.borrow_mut();
        x.log2(self.bits, RM, &mut cc)
    }

    pub fn pow(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        let mut cc = self.consts.borrow_mut();
        x.pow(y, self.bits, RM, &mut cc)
    }

    pub fn powi(&self, x: &BigFloat, e: u64) -> BigFloat {
        self.pow(x, &self.int(e))
    }

    pub fn to_f64(&self, x: &BigFloat) -> f64 {
        format!("{x}").parse().unwrap_or(f64::NAN)
    }

    /// Decimal rendering trimmed to the working digit count.
    pub fn to_string(&self, x: &BigFloat) -> String {
        format!("{x}")
    }

    /// Integer value of a floor()/ceil() result (must be a nonnegative
    /// integer-valued float).
    fn integer_value(&self, x: &BigFloat) -> BigUint {
        if x.is_zero() {
            return BigUint::ZERO;
        }
        let (words, n, sign, exp, _) = x.as_raw_parts().expect("finite value");
        assert!(sign == Sign::Pos, "expected a nonnegative value");
        if exp <= 0 {
            return BigUint::ZERO;
        }
        // value = 0.mantissa × 2^exp with an n-bit mantissa
        let mut bytes = Vec::with_capacity(words.len() * 8);
        for w in words {
            bytes.extend_from_slice(&w.to_le_bytes());
        }
        let mantissa = BigUint::from_bytes_le(&bytes);
        let exp = exp as usize;
        if exp >= n {
            mantissa << (exp - n)
        } else {
            mantissa >> (n - exp)
        }
    }

    /// floor with the distance from x to the nearest integer.
    pub fn floor_uint(&self, x: &BigFloat) -> (BigUint, f64) {
        let fl = x.floor();
        let frac = self.sub(x, &fl);
        let margin = self
            .to_f64(&frac)
            .min(self.to_f64(&self.sub(&self.int(1), &frac)));
        (self.integer_value(&fl), margin.max(0.0))
    }

    /// ceil with the distance from x to the nearest integer.
    pub fn ceil_uint(&self, x: &BigFloat) -> (BigUint, f64) {
        let ce = x.ceil();
        let frac = self.sub(&ce, x);
        let margin = self
            .to_f64(&frac)
            .min(self.to_f64(&self.sub(&self.int(1), &frac)));
        (self.integer_value(&ce), margin.max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roundtrip() {
        let p = Precision::with_digits(50);
        let x = p.ratio(1, 3);
        let three_x = p.mul(&x, &p.int(3));
        assert!((p.to_f64(&three_x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn floor_and_ceil_extract_integers() {
        let p = Precision::with_digits(50);
        let x = p.ratio(123_456_789, 1000);
        let (fl, m1) = p.floor_uint(&x);
        assert_eq!(fl, BigUint::from(123_456u32));
        assert!((m1 - 0.211).abs() < 1e-9);
        let (ce, m2) = p.ceil_uint(&x);
        assert_eq!(ce, BigUint::from(123_457u32));
        assert!((m2 - 0.211).abs() < 1e-9);
    }

    #[test]
    fn big_integers_roundtrip_through_parse() {
        let p = Precision::with_digits(60);
        let v = BigUint::parse_bytes(b"123456789012345678901234567890123456789", 10).unwrap();
        let x = p.big(&v);
        let (back, margin) = p.floor_uint(&x);
        assert_eq!(back, v);
        assert!(margin < 1e-12);
    }

    #[test]
    fn log2_of_ten() {
        let p = Precision::with_digits(50);
        let l = p.log2(&p.int(10));
        assert!((p.to_f64(&l) - std::f64::consts::LOG2_10).abs() < 1e-12);
    }

    #[test]
    fn pow_matches_integers() {
        let p = Precision::with_digits(50);
        let v = p.powi(&p.int(20), 10);
        let (i, _) = p.floor_uint(&v);
        assert_eq!(i, BigUint::from(10_240_000_000_000u64));
    }
}
