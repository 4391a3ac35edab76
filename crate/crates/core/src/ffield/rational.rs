use serde::Serialize;

use super::context::FieldContext;
use super::field::{Field, FieldElement, GaloisField};
use super::parse::parse_fraction;
use super::poly::{Poly, PolyRing};
use crate::error::{Error, Result};

/// `f1 / f2` over `F_{q^n}` with `f1`, `f2` coprime, not divisible by `x`,
/// and each irreducible or a nonzero constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    pub f1: Poly<FieldElement>,
    pub f2: Poly<FieldElement>,
}

/// Result of evaluating a rational function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RationalValue {
    Value(FieldElement),
    Pole,
}

impl RationalFunction {
    /// Validates membership in the admissible class.
    pub fn new(ext: &GaloisField, f1: Poly<FieldElement>, f2: Poly<FieldElement>) -> Result<Self> {
        let ring = PolyRing::new(ext);
        let f1 = ring.trim(f1);
        let f2 = ring.trim(f2);
        let reject = |m: &str| Err(Error::InvalidArgument(format!("rational function: {m}")));
        if ring.is_zero(&f1) || ring.is_zero(&f2) {
            return reject("zero numerator or denominator");
        }
        if ext.is_zero(&f1.coeffs[0]) || ext.is_zero(&f2.coeffs[0]) {
            return reject("x divides numerator or denominator");
        }
        if ring.degree(&ring.gcd(&f1, &f2)) != Some(0) {
            return reject("numerator and denominator are not coprime");
        }
        for f in [&f1, &f2] {
            if ring.degree(f) != Some(0) && !ring.is_irreducible(f) {
                return reject("numerator and denominator must be irreducible or constant");
            }
        }
        if ring.degree(&f1).unwrap() + ring.degree(&f2).unwrap() == 0 {
            return reject("total degree must be at least one");
        }
        Ok(Self { f1, f2 })
    }

    /// Parses an expression such as `x^2 + t*x + 3` or `(x+1)/(x+2)`, where
    /// `t` is the class of the indeterminate in the polynomial basis of `F_{q^n}`.
    pub fn parse(ctx: &FieldContext, text: &str) -> Result<Self> {
        let ext = ctx.ext();
        let (f1, f2) = parse_fraction(text, ext, Some(ext.gen()))?;
        Self::new(ext, f1, f2)
    }

    #[must_use]
    pub fn m1(&self) -> usize {
        self.f1.coeffs.len() - 1
    }

    #[must_use]
    pub fn m2(&self) -> usize {
        self.f2.coeffs.len() - 1
    }

    /// `m = m1 + m2`.
    #[must_use]
    pub fn degree(&self) -> usize {
        self.m1() + self.m2()
    }

    #[must_use]
    pub fn evaluate(&self, ext: &GaloisField, eps: &FieldElement) -> RationalValue {
        let ring = PolyRing::new(ext);
        let den = ring.eval(&self.f2, eps);
        match ext.inv(&den) {
            None => RationalValue::Pole,
            Some(di) => RationalValue::Value(ext.mul(&ring.eval(&self.f1, eps), &di)),
        }
    }
}
