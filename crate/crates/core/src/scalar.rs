//! Numeric scalar abstraction for the real-valued parts of the library:
//! the list-size constant α, the inner-solver factor κ, and the
//! per-subspace weights of the color-space reduction. Everything else is
//! integer arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};
use std::fmt::Debug;

pub trait Scalar: Num + PartialOrd + Clone + Debug + Send + Sync + 'static {
    fn from_u64(v: u64) -> Self;
    fn from_ratio(num: u64, den: u64) -> Self;
    /// Parses a decimal literal such as `16`, `0.4` or `2.5e1`.
    fn parse_decimal(s: &str) -> Option<Self>;
    /// `floor(self)` as an integer; `None` when negative, non-finite or too large.
    fn floor_u64(&self) -> Option<u64>;
    fn to_f64(&self) -> f64;

    fn powu(&self, e: u32) -> Self {
        num_traits::pow(self.clone(), e as usize)
    }

    fn from_u128(v: u128) -> Self {
        let hi = Self::from_u64((v >> 64) as u64);
        let lo = Self::from_u64(v as u64);
        let shift = Self::from_u64(1 << 32);
        hi * shift.clone() * shift + lo
    }
}

impl Scalar for f64 {
    fn from_u64(v: u64) -> Self {
        v as f64
    }
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok().filter(|v: &f64| v.is_finite())
    }
    fn floor_u64(&self) -> Option<u64> {
        (self.is_finite() && *self >= 0.0 && *self < 1.8e19).then(|| self.floor() as u64)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_u64(v: u64) -> Self {
        v as f32
    }
    fn from_ratio(num: u64, den: u64) -> Self {
        (num as f64 / den as f64) as f32
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok().filter(|v: &f32| v.is_finite())
    }
    fn floor_u64(&self) -> Option<u64> {
        (self.is_finite() && *self >= 0.0 && *self < 1.8e19).then(|| self.floor() as u64)
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for BigRational {
    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        let s = s.trim();
        let (mant, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
            None => (s, 0),
        };
        let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        let digits = format!("{int}{frac}");
        let num = BigInt::from_str_radix(&digits, 10).ok()?;
        let scale = exp - frac.len() as i32;
        let ten = BigInt::from(10u32);
        Some(if scale >= 0 {
            BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
        })
    }
    fn floor_u64(&self) -> Option<u64> {
        if *self < BigRational::zero() {
            return None;
        }
        self.floor().to_integer().to_u64()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::INFINITY)
    }
}

/// Largest integer `q` with `q^k ≤ x` (0 for `x < 1`).
pub fn floor_root<S: Scalar>(x: &S, k: u32) -> u64 {
    assert!(k >= 1);
    if *x < S::one() {
        return 0;
    }
    let fits = |q: u64| S::from_u64(q).powu(k) <= *x;
    let mut lo = 1u64;
    let mut hi = 2u64;
    while hi < (1 << 62) && fits(hi) {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Smallest integer `q ≥ 0` with `q^k ≥ x`.
pub fn ceil_root<S: Scalar>(x: &S, k: u32) -> u64 {
    let f = floor_root(x, k);
    if S::from_u64(f).powu(k) >= *x {
        f
    } else {
        f + 1
    }
}

/// `ceil(x)` for `x ≥ 0`; `None` when out of range.
pub fn ceil_u64<S: Scalar>(x: &S) -> Option<u64> {
    let f = x.floor_u64()?;
    if S::from_u64(f) < *x {
        f.checked_add(1)
    } else {
        Some(f)
    }
}

/// `floor(log_4(x))` for `x > 0`, exact in any scalar type.
pub fn floor_log4<S: Scalar>(x: &S) -> i32 {
    assert!(*x > S::zero());
    let four = S::from_u64(4);
    let mut e = 0i32;
    let mut p = S::one();
    if *x >= S::one() {
        while p.clone() * four.clone() <= *x {
            p = p * four.clone();
            e += 1;
        }
    } else {
        while p > *x {
            p = p / four.clone();
            e -= 1;
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_are_exact_in_every_scalar() {
        assert_eq!(floor_root(&27.0f64, 3), 3);
        assert_eq!(floor_root(&26.9f64, 3), 2);
        assert_eq!(floor_root(&BigRational::from_ratio(17, 4), 2), 2);
        assert_eq!(ceil_root(&BigRational::from_ratio(17, 4), 2), 3);
        assert_eq!(ceil_root(&16.0f32, 2), 4);
        assert_eq!(floor_root(&0.5f64, 2), 0);
    }

    #[test]
    fn log4_floors_fractions() {
        assert_eq!(floor_log4(&0.6f64), -1);
        assert_eq!(floor_log4(&BigRational::from_ratio(1, 4)), -1);
        assert_eq!(floor_log4(&BigRational::from_ratio(1, 5)), -2);
        assert_eq!(floor_log4(&64.0f64), 3);
        assert_eq!(floor_log4(&63.0f64), 2);
    }

    #[test]
    fn decimal_parsing_agrees() {
        let r = BigRational::parse_decimal("0.4").unwrap();
        assert_eq!(r, BigRational::from_ratio(2, 5));
        assert_eq!(BigRational::parse_decimal("1.5e2").unwrap(), <BigRational as Scalar>::from_u64(150));
        assert_eq!(f64::parse_decimal("16").unwrap(), 16.0);
        assert!(BigRational::parse_decimal("x").is_none());
    }
}
