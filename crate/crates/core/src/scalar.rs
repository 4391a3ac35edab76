//! Scalar abstraction shared by the density and sieve computations.
//!
//! Every aggregate that is a finite sum of rationals (densities such as
//! `theta`, sieve sums) is written once against [`Scalar`] and instantiated
//! either with machine floats or with exact [`BigRational`]s.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub trait Scalar: Clone + Debug + PartialOrd + Signed {
    fn from_ratio(numer: &BigInt, denom: &BigInt) -> Self;

    fn as_f64(&self) -> f64;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(&BigInt::from(v), &BigInt::one())
    }

    /// `1 / d` for a positive integer `d`.
    fn recip_of(d: &BigUint) -> Self {
        Self::from_ratio(&BigInt::one(), &BigInt::from(d.clone()))
    }
}

impl Scalar for f64 {
    fn from_ratio(numer: &BigInt, denom: &BigInt) -> Self {
        ratio_to_f64(numer, denom)
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_ratio(numer: &BigInt, denom: &BigInt) -> Self {
        ratio_to_f64(numer, denom) as f32
    }
    fn as_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    fn from_ratio(numer: &BigInt, denom: &BigInt) -> Self {
        BigRational::new(numer.clone(), denom.clone())
    }
    fn as_f64(&self) -> f64 {
        ratio_to_f64(self.numer(), self.denom())
    }
}

fn ratio_to_f64(numer: &BigInt, denom: &BigInt) -> f64 {
    if numer.is_zero() {
        return 0.0;
    }
    ToPrimitive::to_f64(&BigRational::new(numer.clone(), denom.clone()))
        .unwrap_or(f64::NAN)
}

/// Parses a decimal literal such as `2.24e11067` or `-0.5` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = |msg: &str| Error::Parse { pos: 0, msg: format!("{msg}: {s:?}") };
    let t = s.trim();
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad("bad exponent"))?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad("empty mantissa"));
    }
    let all: String = [int_part, frac_part].concat();
    if !all.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad("bad digit"));
    }
    let mut n: BigInt = all.parse().map_err(|_| bad("bad digits"))?;
    if neg {
        n = -n;
    }
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    Ok(if shift >= 0 {
        BigRational::from_integer(n * scale)
    } else {
        BigRational::new(n, scale)
    })
}

/// Renders a rational as `num/den` (or just `num` for integers).
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing() {
        let r = parse_decimal("2.5e-1").unwrap();
        assert_eq!(r, BigRational::new(1.into(), 4.into()));
        let big = parse_decimal("2.24e11067").unwrap();
        assert!(big.is_integer());
        assert_eq!(big.numer().to_string().len(), 11068);
        assert!(parse_decimal("1.2.3").is_err());
        assert_eq!(parse_decimal("-3").unwrap(), BigRational::from_integer((-3).into()));
    }

    #[test]
    fn scalar_instances_agree() {
        let n = BigInt::from(3);
        let d = BigInt::from(7);
        let exact = <BigRational as Scalar>::from_ratio(&n, &d);
        assert!((exact.as_f64() - 3.0 / 7.0).abs() < 1e-15);
        assert!((<f32 as Scalar>::from_ratio(&n, &d) - 3.0 / 7.0).abs() < 1e-6);
        let tiny = <f64 as Scalar>::recip_of(&BigUint::from(10u32).pow(400));
        assert_eq!(tiny, 0.0);
    }
}
