//! Integer arithmetic: primality, factorization of `q^n - 1`, and the
//! multiplicative functions built on top of factorizations.

mod factor;
mod hints;
pub mod primality;
pub mod primes;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, One, ToPrimitive, Zero};

pub use factor::{
    cyclotomic_pieces, cyclotomic_value, factorize, perfect_power_root, Budget, CyclotomicPiece,
    Factorization, Factorizer,
};
pub(crate) use factor::{divisors_u64, factor_u64};
pub use hints::FactorHintCache;
pub use primality::{is_prime, is_prime_u64};
pub use primes::{first_primes, for_each_prime_upto, primes_upto, TRIAL_LIMIT};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Number of distinct prime factors.
pub fn omega(f: &Factorization) -> Result<u32> {
    f.require_complete()?;
    Ok(f.factors().len() as u32)
}

/// `W = 2^omega`.
pub fn w(f: &Factorization) -> Result<BigUint> {
    Ok(BigUint::one() << omega(f)?)
}

/// Bounds on omega that also hold for incomplete factorizations.
///
/// Every prime of the cofactor exceeds [`TRIAL_LIMIT`], so the cofactor has
/// between one and `log(cofactor) / log(TRIAL_LIMIT)` distinct primes.
#[must_use]
pub fn omega_bounds(f: &Factorization) -> (u32, u32) {
    let known = f.factors().len() as u32;
    if f.is_complete() {
        return (known, known);
    }
    let bits = f.cofactor().bits() as f64;
    let hi = (bits / (TRIAL_LIMIT as f64).log2()).floor().max(1.0) as u32;
    (known + 1, known + hi)
}

pub fn euler_phi(f: &Factorization) -> Result<BigUint> {
    f.require_complete()?;
    Ok(f.factors()
        .iter()
        .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(e - 1) * (p - 1u32)))
}

pub fn mobius(f: &Factorization) -> Result<i32> {
    f.require_complete()?;
    if f.factors().iter().any(|(_, e)| *e > 1) {
        return Ok(0);
    }
    Ok(if f.factors().len() % 2 == 0 { 1 } else { -1 })
}

/// `phi(e) / e`.
pub fn theta<T: Scalar>(f: &Factorization) -> Result<T> {
    f.require_complete()?;
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (p, _) in f.factors() {
        let p = BigInt::from(p.clone());
        num *= &p - 1;
        den *= p;
    }
    Ok(T::from_ratio(&num, &den))
}

/// Largest divisor of `e` coprime to `gcd(e, q - 1)`.
pub fn coprime_part_q(e: &Factorization, q: u64) -> Result<Factorization> {
    e.require_complete()?;
    Ok(coprime_part_partial(e, q))
}

/// As [`coprime_part_q`] but keeps an unresolved cofactor when `e` is incomplete.
///
/// The cofactor is kept whole; primes of `q - 1` above [`TRIAL_LIMIT`] that
/// hide in it are not stripped.
#[must_use]
pub fn coprime_part_partial(e: &Factorization, q: u64) -> Factorization {
    let delta = e.value().gcd(&BigUint::from(q - 1));
    Factorization::from_parts(
        e.factors().iter().filter(|(p, _)| !(&delta % p).is_zero()).cloned(),
        e.cofactor().clone(),
    )
}

/// The constant of the `W(m) <= C m^(1/r)` bound built from primes `<= 2^r` dividing `m`.
pub fn w_bound_constant<T: Float>(r: T, f: &Factorization) -> Result<T> {
    f.require_complete()?;
    let bound = T::from(2.0).unwrap().powf(r);
    let two = T::from(2.0).unwrap();
    Ok(f.factors().iter().fold(T::one(), |acc, (p, _)| {
        let p = T::from(p.to_f64().unwrap_or(f64::INFINITY)).unwrap();
        if p <= bound {
            acc * two / p.powf(r.recip())
        } else {
            acc
        }
    }))
}

/// Natural log of [`c_max`].
pub fn ln_c_max(r: f64) -> Result<f64> {
    if !(r > 0.0) || r > 32.0 {
        return Err(Error::RangeExceeded(format!("c_max needs 0 < r <= 32, got {r}")));
    }
    let limit = 2f64.powf(r).floor() as u64;
    let ln2 = std::f64::consts::LN_2;
    let mut acc = 0.0;
    for_each_prime_upto(limit, |p| acc += ln2 - (p as f64).ln() / r);
    Ok(acc)
}

/// `prod_{p <= 2^r} 2 / p^(1/r)`, the supremum of [`w_bound_constant`] over all `m`.
pub fn c_max(r: f64) -> Result<f64> {
    ln_c_max(r).map(f64::exp)
}

/// Whether the product of the first `count` primes exceeds `threshold`, exactly.
#[must_use]
pub fn primorial_exceeds(count: usize, threshold: &BigRational) -> bool {
    let prod = first_primes(count)
        .into_iter()
        .fold(BigUint::one(), |acc, p| acc * p);
    BigRational::from_integer(BigInt::from(prod)) > *threshold
}

/// Multiplicative order of `q` modulo `m` (`gcd(q, m) = 1`), via the factorization of `phi(m)`.
pub fn multiplicative_order(q: u64, m: u64) -> Result<u64> {
    if m == 0 || q.gcd(&m) != 1 {
        return Err(Error::NotCoprime(format!("q={q}, m={m}")));
    }
    if m == 1 {
        return Ok(1);
    }
    let phi: u64 = factor_u64(m).iter().map(|&(p, e)| p.pow(e - 1) * (p - 1)).product();
    let mut ord = phi;
    for (l, _) in factor_u64(phi) {
        while ord % l == 0 && primality::powmod64(q % m, ord / l, m) == 1 {
            ord /= l;
        }
    }
    Ok(ord)
}
