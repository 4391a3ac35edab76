//! Factorization structure of `x^n - 1` over `F_q`.
//!
//! Only degrees and counts are needed for the sieve; explicit factor
//! polynomials are produced by [`explicit_factors`] for the small fields the
//! oracle works with.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffield::{Field, GaloisField, Poly, PolyRing, PrimeField};
use crate::intarith::{divisors_u64, factor_u64, multiplicative_order};
use crate::scalar::Scalar;

/// Irreducible factors of `x^{n'} - 1` coming from `Phi_t`: `count` factors of degree `ord_t(q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CyclotomicClass {
    pub order: u64,
    pub degree: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XnFactorization {
    pub q: u64,
    pub n: u64,
    pub n_prime: u64,
    pub p_power: u64,
    /// One entry per divisor `t` of `n'`, ascending in `t`.
    pub classes: Vec<CyclotomicClass>,
}

impl XnFactorization {
    /// `(degree, count)` of distinct irreducible factors, ascending in degree.
    #[must_use]
    pub fn distinct_factors(&self) -> Vec<(u64, u64)> {
        let mut by_deg: BTreeMap<u64, u64> = BTreeMap::new();
        for c in &self.classes {
            *by_deg.entry(c.degree).or_default() += c.count;
        }
        by_deg.into_iter().collect()
    }

    /// Number of distinct irreducible factors.
    #[must_use]
    pub fn distinct_count(&self) -> u64 {
        self.classes.iter().map(|c| c.count).sum()
    }

    /// `d = ord_{n'}(q)`, the largest factor degree.
    #[must_use]
    pub fn max_degree(&self) -> u64 {
        self.classes.iter().map(|c| c.degree).max().unwrap_or(1)
    }

    /// Number of distinct factors of degree below `d`.
    #[must_use]
    pub fn count_below_max(&self) -> u64 {
        let d = self.max_degree();
        self.classes.iter().filter(|c| c.degree < d).map(|c| c.count).sum()
    }
}

impl Serialize for XnFactorization {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("XnFactorization", 5)?;
        st.serialize_field("q", &self.q)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("n_prime", &self.n_prime)?;
        st.serialize_field("p_power", &self.p_power)?;
        st.serialize_field("factors", &self.distinct_factors())?;
        st.end()
    }
}

/// Smallest prime dividing `q`; errors when `q` is not a prime power.
pub fn characteristic_of(q: u64) -> Result<u64> {
    let f = factor_u64(q);
    match f.as_slice() {
        [(p, _)] if q >= 2 => Ok(*p),
        _ => Err(Error::NotPrimePower(q.to_string())),
    }
}

/// Orbits of `Z/n'` under multiplication by `q`, each sorted, ordered by least element.
pub fn cyclotomic_cosets(q: u64, n_prime: u64) -> Result<Vec<Vec<u64>>> {
    if n_prime == 0 || q.gcd(&n_prime) != 1 {
        return Err(Error::NotCoprime(format!("q={q}, n'={n_prime}")));
    }
    let mut seen = vec![false; n_prime as usize];
    let mut out = Vec::new();
    for start in 0..n_prime {
        if seen[start as usize] {
            continue;
        }
        let mut coset = Vec::new();
        let mut j = start;
        while !seen[j as usize] {
            seen[j as usize] = true;
            coset.push(j);
            j = ((j as u128 * q as u128) % n_prime as u128) as u64;
        }
        coset.sort_unstable();
        out.push(coset);
    }
    Ok(out)
}

/// Splits `n = n' p^i` with `p` the characteristic of `q`.
pub fn split_n(q: u64, n: u64) -> Result<(u64, u64)> {
    let p = characteristic_of(q)?;
    let (mut n_prime, mut pw) = (n, 1);
    while n_prime % p == 0 {
        n_prime /= p;
        pw *= p;
    }
    Ok((n_prime, pw))
}

pub fn factor_xn_minus_1(q: u64, n: u64) -> Result<XnFactorization> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let (n_prime, p_power) = split_n(q, n)?;
    let mut classes = Vec::new();
    for t in divisors_u64(n_prime) {
        let degree = multiplicative_order(q, t)?;
        let phi: u64 = factor_u64(t).iter().map(|&(p, e)| p.pow(e - 1) * (p - 1)).product();
        classes.push(CyclotomicClass { order: t, degree, count: phi / degree });
    }
    Ok(XnFactorization { q, n, n_prime, p_power, classes })
}

/// `Phi_q(g)` for `g` given as `(degree, multiplicity)` of its distinct irreducible factors.
#[must_use]
pub fn poly_euler_phi(q: u64, factors: &[(u64, u32)]) -> BigUint {
    let qb = BigUint::from(q);
    factors.iter().fold(BigUint::one(), |acc, &(d, e)| {
        let qd = qb.pow(d as u32);
        acc * (&qd - 1u32) * qd.pow(e - 1)
    })
}

/// `mu_q(h)` from the multiplicities of the distinct irreducible factors of `h`.
#[must_use]
pub fn poly_mobius(multiplicities: &[u32]) -> i32 {
    if multiplicities.iter().any(|&e| e > 1) {
        0
    } else if multiplicities.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `Theta(g) = prod (1 - q^{-deg})` over the distinct irreducible factors of `g`.
#[must_use]
pub fn big_theta<T: Scalar>(q: u64, degrees: &[u64]) -> T {
    let qb = BigInt::from(q);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for &d in degrees {
        let qd = qb.pow(d as u32);
        num *= &qd - 1;
        den *= qd;
    }
    T::from_ratio(&num, &den)
}

/// `W(x^n - 1) = 2^{#distinct factors}`.
pub fn w_xn(q: u64, n: u64) -> Result<BigUint> {
    Ok(BigUint::one() << factor_xn_minus_1(q, n)?.distinct_count())
}

/// Exact `W(x^n - 1)` together with the three bounds relating it to `n` and `gcd(n, q - 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XnWBounds {
    pub w_log2: u64,
    /// `W <= 2^{(n + gcd(n, q-1))/2}`.
    pub half_bound: bool,
    /// `W = 2^n` exactly when `n | q - 1`.
    pub equality_iff: bool,
    /// `W <= 2^{3n/4}` when `n` does not divide `q - 1` (vacuously true otherwise).
    pub three_quarter_bound: bool,
}

impl XnWBounds {
    #[must_use]
    pub fn all_hold(&self) -> bool {
        self.half_bound && self.equality_iff && self.three_quarter_bound
    }
}

pub fn xn_w_bounds(q: u64, n: u64) -> Result<XnWBounds> {
    let w = factor_xn_minus_1(q, n)?.distinct_count();
    let g = n.gcd(&(q - 1));
    let divides = (q - 1) % n == 0;
    Ok(XnWBounds {
        w_log2: w,
        half_bound: 2 * w <= n + g,
        equality_iff: (w == n) == divides,
        three_quarter_bound: divides || 4 * w <= 3 * n,
    })
}

/// `pi(q, n') = N_0 / n'` with `N_0` the number of factors of degree below `ord_{n'}(q)`.
pub fn pi_ratio(q: u64, n_prime: u64) -> Result<BigRational> {
    if q.gcd(&n_prime) != 1 {
        return Err(Error::NotCoprime(format!("q={q}, n'={n_prime}")));
    }
    let xf = factor_xn_minus_1(q, n_prime)?;
    Ok(BigRational::new(xf.count_below_max().into(), n_prime.into()))
}

/// `N_0 / n` for arbitrary `n`; satisfies `n pi(q, n) = n' pi(q, n')`.
pub fn pi_ratio_scaled(q: u64, n: u64) -> Result<BigRational> {
    let xf = factor_xn_minus_1(q, n)?;
    Ok(BigRational::new(xf.count_below_max().into(), n.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PiCase {
    /// `n' = 2 gcd(n', q-1)`: `d = 2`, `pi = 1/2`.
    Two,
    /// `n' = 4 gcd(n', q-1)`, `q = 1 mod 4`: `d = 4`, `pi = 3/8`.
    Four,
    /// `n' = 6 gcd(n', q-1)`, `q = 1 mod 6`: `d = 6`, `pi = 13/36`.
    Six,
    /// Everything else: `pi <= 1/3`.
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PiClassification {
    pub case: PiCase,
    pub d: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub pi: BigRational,
    /// Whether `d` and `pi` agree with the values the case predicts.
    pub consistent: bool,
}

fn ser_ratio<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::scalar::rational_string(r))
}

pub fn classify_pi(q: u64, n_prime: u64) -> Result<PiClassification> {
    let pi = pi_ratio(q, n_prime)?;
    let d = multiplicative_order(q, n_prime)?;
    let n1 = n_prime.gcd(&(q - 1));
    let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let (case, consistent) = if n_prime == 2 * n1 {
        (PiCase::Two, d == 2 && pi == r(1, 2))
    } else if n_prime == 4 * n1 && q % 4 == 1 {
        (PiCase::Four, d == 4 && pi == r(3, 8))
    } else if n_prime == 6 * n1 && q % 6 == 1 {
        (PiCase::Six, d == 6 && pi == r(13, 36))
    } else {
        (PiCase::Other, pi <= r(1, 3))
    };
    Ok(PiClassification { case, d, pi, consistent })
}

/// `Phi_t` over `F_p`.
#[must_use]
pub fn cyclotomic_poly_mod_p(p: u64, t: u64) -> Poly<u64> {
    let fp = PrimeField::new(p);
    let ring = PolyRing::new(&fp);
    let mut acc = ring.x_pow_minus_one(t as usize);
    for d in divisors_u64(t) {
        if d < t {
            acc = ring.exact_div(&acc, &cyclotomic_poly_mod_p(p, d)).expect("Phi_d divides x^t - 1");
        }
    }
    acc
}

/// One explicit irreducible factor of `x^n - 1` over `F_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitFactor {
    /// Monic, coefficients in `F_q`.
    pub poly: Poly<crate::ffield::FieldElement>,
    /// The `t` with `poly | Phi_t`.
    pub order: u64,
    /// Exponent in `x^n - 1` (the `p`-part of `n`).
    pub multiplicity: u64,
}

/// Monic irreducible factors of `x^n - 1` over `base = F_q`, grouped by `t | n'`.
pub fn explicit_factors(base: &GaloisField, n: u64, seed: u64) -> Result<Vec<ExplicitFactor>> {
    let q = base.size_u64().ok_or_else(|| Error::RangeExceeded("base field too large".into()))?;
    let xf = factor_xn_minus_1(q, n)?;
    let ring = PolyRing::new(base);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for class in &xf.classes {
        let phi = cyclotomic_poly_mod_p(base.characteristic(), class.order);
        let lifted = Poly::new(phi.coeffs.iter().map(|&c| base.from_int(c)).collect());
        for poly in ring.equal_degree_factors(&lifted, class.degree as usize, &mut rng) {
            out.push(ExplicitFactor { poly, order: class.order, multiplicity: xf.p_power });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn coset_examples() {
        let c = cyclotomic_cosets(7, 11).unwrap();
        assert_eq!(c.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 10]);
        assert_eq!(cyclotomic_cosets(5, 1).unwrap(), vec![vec![0]]);
        assert_eq!(cyclotomic_cosets(7, 6).unwrap().len(), 6);
        assert!(cyclotomic_cosets(7, 14).is_err());
    }

    #[test]
    fn xn_examples() {
        let f = factor_xn_minus_1(7, 6).unwrap();
        assert_eq!(f.distinct_factors(), vec![(1, 6)]);
        assert_eq!(w_xn(7, 6).unwrap(), BigUint::from(64u32));
        let f = factor_xn_minus_1(7, 7).unwrap();
        assert_eq!((f.n_prime, f.p_power, f.distinct_count()), (1, 7, 1));
        assert_eq!(factor_xn_minus_1(7, 11).unwrap().distinct_factors(), vec![(1, 1), (10, 1)]);
        let json = serde_json::to_string(&factor_xn_minus_1(7, 11).unwrap()).unwrap();
        assert_eq!(json, r#"{"q":7,"n":11,"n_prime":11,"p_power":1,"factors":[[1,1],[10,1]]}"#);
    }

    #[test]
    fn phi_theta_examples() {
        assert_eq!(poly_euler_phi(7, &[]), BigUint::one());
        assert_eq!(poly_euler_phi(7, &[(1, 1)]), BigUint::from(6u32));
        assert_eq!(poly_euler_phi(7, &[(1, 1), (1, 1)]), BigUint::from(36u32));
        let th: BigRational = big_theta(7, &[1]);
        assert_eq!(th, BigRational::new(6.into(), 7.into()));
        assert_eq!(poly_mobius(&[]), 1);
        assert_eq!(poly_mobius(&[1, 2]), 0);
    }

    #[test]
    fn xn_w_bounds_examples() {
        let r = xn_w_bounds(7, 6).unwrap();
        assert_eq!(r.w_log2, 6);
        assert!(r.all_hold());
        assert!(xn_w_bounds(7, 11).unwrap().all_hold());
        assert!(xn_w_bounds(49, 10).unwrap().three_quarter_bound);
    }

    #[test]
    fn pi_examples() {
        assert_eq!(pi_ratio(7, 11).unwrap(), BigRational::new(1.into(), 11.into()));
        let c = classify_pi(7, 36).unwrap();
        assert_eq!(c.case, PiCase::Six);
        assert!(c.consistent);
        let c = classify_pi(7, 12).unwrap();
        assert_eq!(c.case, PiCase::Two);
        assert!(c.consistent);
    }

    #[test]
    fn pi_classes_over_powers_of_seven() {
        for k in 1..=4u32 {
            let q = 7u64.pow(k);
            for n_prime in (5..=400u64).filter(|m| m % 7 != 0) {
                let c = classify_pi(q, n_prime).unwrap();
                assert!(c.consistent, "q={q} n'={n_prime} {c:?}");
            }
        }
    }

    #[test]
    fn explicit_factors_multiply_back() {
        for (p, k, n) in [(2u64, 1usize, 6u64), (7, 1, 6), (3, 2, 4), (7, 1, 7), (2, 2, 5), (5, 1, 12)] {
            let base = GaloisField::with_degree(p, k);
            let ring = PolyRing::new(&base);
            let fs = explicit_factors(&base, n, 1).unwrap();
            let mut prod = ring.one();
            for f in &fs {
                assert!(ring.is_irreducible(&f.poly));
                prod = ring.mul(&prod, &ring.pow(&f.poly, f.multiplicity as u32));
            }
            assert_eq!(prod, ring.x_pow_minus_one(n as usize), "p={p} k={k} n={n}");
            let q = p.pow(k as u32);
            assert_eq!(fs.len() as u64, factor_xn_minus_1(q, n).unwrap().distinct_count());
        }
    }

    proptest! {
        #[test]
        fn degrees_sum_to_n_prime(qi in 0usize..12, n in 1u64..200) {
            let q = [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 49][qi];
            let f = factor_xn_minus_1(q, n).unwrap();
            let total: u64 = f.distinct_factors().iter().map(|(d, c)| d * c).sum();
            prop_assert_eq!(total, f.n_prime);
            prop_assert_eq!(f.n_prime * f.p_power, n);
            let cosets = cyclotomic_cosets(q, f.n_prime).unwrap();
            prop_assert_eq!(cosets.len() as u64, f.distinct_count());
            for c in &cosets {
                prop_assert_eq!(f.max_degree() % c.len() as u64, 0);
            }
            let lhs = BigRational::from_integer(n.into()) * pi_ratio_scaled(q, n).unwrap();
            let rhs = BigRational::from_integer(f.n_prime.into()) * pi_ratio(q, f.n_prime).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn xn_w_bounds_holds(qi in 0usize..17, n in 1u64..=100) {
            let q = [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 32, 49][qi];
            prop_assert!(xn_w_bounds(q, n).unwrap().all_hold());
        }
    }
}
