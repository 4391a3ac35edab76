use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::poly::{Poly, PolyRing};

/// Arithmetic of a finite field; elements are plain values interpreted by the field.
pub trait Field {
    type Elem: Clone + PartialEq + Eq + Hash + Debug;

    fn characteristic(&self) -> u64;
    /// Degree over the prime field.
    fn degree(&self) -> usize;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Image of an integer under `Z -> F`.
    fn from_int(&self, v: u64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn order(&self) -> BigUint {
        BigUint::from(self.characteristic()).pow(self.degree() as u32)
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    fn pow_u64(&self, a: &Self::Elem, e: u64) -> Self::Elem {
        self.pow(a, &BigUint::from(e))
    }
}

/// The prime field `F_p` with `p < 2^32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    #[must_use]
    pub fn new(p: u64) -> Self {
        assert!(p >= 2 && p < (1 << 32), "characteristic out of range");
        Self { p }
    }

    #[must_use]
    pub fn p(&self) -> u64 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> usize {
        1
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_int(&self, v: u64) -> u64 {
        v % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        (*a != 0).then(|| self.pow_u64(a, self.p - 2))
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn pow_u64(&self, a: &u64, mut e: u64) -> u64 {
        let (mut b, mut r) = (*a % self.p, 1 % self.p);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % self.p;
            }
            b = b * b % self.p;
            e >>= 1;
        }
        r
    }
}

/// Element of `F_p[x]/(m)`: coefficients of the reduced representative, low degree first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement {
    pub coeffs: Vec<u64>,
}

/// `GF(p^D)` as `F_p[x]/(m)` for a monic irreducible `m` of degree `D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    p: u64,
    modulus: Vec<u64>,
}

impl GaloisField {
    /// `modulus` is monic, low degree first, and assumed irreducible.
    #[must_use]
    pub fn new(p: u64, modulus: Vec<u64>) -> Self {
        assert!(p >= 2 && p < (1 << 32), "characteristic out of range");
        assert!(modulus.len() >= 2 && *modulus.last().unwrap() == 1, "modulus must be monic");
        Self { p, modulus }
    }

    /// Uses the first monic irreducible of degree `d` (see [`first_irreducible`]).
    #[must_use]
    pub fn with_degree(p: u64, d: usize) -> Self {
        Self::new(p, first_irreducible(p, d))
    }

    #[must_use]
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// The class of `x`, i.e. a root of the modulus.
    #[must_use]
    pub fn gen(&self) -> FieldElement {
        let mut c = vec![0; self.degree()];
        if self.degree() > 1 {
            c[1] = 1;
        } else {
            c[0] = (self.p - self.modulus[0]) % self.p;
        }
        FieldElement { coeffs: c }
    }

    #[must_use]
    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        let mut c = vec![0; self.degree()];
        for (i, v) in coeffs.iter().enumerate().take(self.degree()) {
            c[i] = v % self.p;
        }
        FieldElement { coeffs: c }
    }

    /// Base-`p` index `sum c_i p^i`.
    #[must_use]
    pub fn to_index(&self, a: &FieldElement) -> BigUint {
        a.coeffs.iter().rev().fold(BigUint::zero(), |acc, &c| acc * self.p + c)
    }

    #[must_use]
    pub fn to_index_u64(&self, a: &FieldElement) -> u64 {
        a.coeffs.iter().rev().fold(0u64, |acc, &c| acc * self.p + c)
    }

    #[must_use]
    pub fn from_index_u64(&self, mut idx: u64) -> FieldElement {
        let mut c = vec![0; self.degree()];
        for slot in &mut c {
            *slot = idx % self.p;
            idx /= self.p;
        }
        FieldElement { coeffs: c }
    }

    #[must_use]
    pub fn size_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    /// Absolute trace `sum a^(p^i)`, as an element of `F_p`.
    #[must_use]
    pub fn absolute_trace(&self, a: &FieldElement) -> u64 {
        let mut acc = self.zero();
        let mut cur = a.clone();
        for _ in 0..self.degree() {
            acc = self.add(&acc, &cur);
            cur = self.pow_u64(&cur, self.p);
        }
        acc.coeffs[0]
    }
}

impl Field for GaloisField {
    type Elem = FieldElement;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> usize {
        self.modulus.len() - 1
    }
    fn zero(&self) -> FieldElement {
        FieldElement { coeffs: vec![0; self.degree()] }
    }
    fn one(&self) -> FieldElement {
        self.from_int(1)
    }
    fn from_int(&self, v: u64) -> FieldElement {
        let mut c = vec![0; self.degree()];
        c[0] = v % self.p;
        FieldElement { coeffs: c }
    }
    fn is_zero(&self, a: &FieldElement) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }
    fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p;
        FieldElement { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x + y) % p).collect() }
    }
    fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p;
        FieldElement { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x + p - y) % p).collect() }
    }
    fn neg(&self, a: &FieldElement) -> FieldElement {
        let p = self.p;
        FieldElement { coeffs: a.coeffs.iter().map(|x| (p - x) % p).collect() }
    }
    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let d = self.degree();
        let p = self.p;
        if d == 1 {
            return FieldElement { coeffs: vec![a.coeffs[0] * b.coeffs[0] % p] };
        }
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        for k in (d..2 * d - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            let negc = p - c;
            for j in 0..d {
                prod[k - d + j] = (prod[k - d + j] + negc * self.modulus[j]) % p;
            }
        }
        prod.truncate(d);
        FieldElement { coeffs: prod }
    }
    fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        if self.is_zero(a) {
            return None;
        }
        let fp = PrimeField::new(self.p);
        let ring = PolyRing::new(&fp);
        let (g, s, _) = ring.xgcd(&Poly::new(a.coeffs.clone()), &Poly::new(self.modulus.clone()));
        debug_assert_eq!(ring.degree(&g), Some(0));
        let ginv = fp.inv(&g.coeffs[0])?;
        let s = ring.scale(&s, &ginv);
        Some(self.from_coeffs(&s.coeffs))
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement { coeffs: (0..self.degree()).map(|_| rng.gen_range(0..self.p)).collect() }
    }
}

/// First monic irreducible of degree `d` over `F_p`, enumerating the lower
/// coefficients `(c_0, ..., c_{d-1})` as a base-`p` counter with `c_0` least significant.
#[must_use]
pub fn first_irreducible(p: u64, d: usize) -> Vec<u64> {
    assert!(d >= 1);
    let fp = PrimeField::new(p);
    let ring = PolyRing::new(&fp);
    let mut lower = vec![0u64; d];
    loop {
        let mut c = lower.clone();
        c.push(1);
        let f = Poly::new(c.clone());
        if (d == 1 || c[0] != 0) && ring.is_irreducible(&f) {
            return c;
        }
        let mut i = 0;
        loop {
            lower[i] += 1;
            if lower[i] < p {
                break;
            }
            lower[i] = 0;
            i += 1;
            assert!(i < d, "no irreducible polynomial found");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_moduli() {
        assert_eq!(first_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(first_irreducible(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(first_irreducible(7, 1), vec![0, 1]);
        assert_eq!(first_irreducible(7, 2), vec![1, 0, 1]);
    }

    #[test]
    fn field_axioms_gf8() {
        let f = GaloisField::with_degree(2, 3);
        let all: Vec<FieldElement> = (0..8).map(|i| f.from_index_u64(i)).collect();
        for a in &all {
            if !f.is_zero(a) {
                assert!(f.is_one(&f.mul(a, &f.inv(a).unwrap())));
                assert!(f.is_one(&f.pow_u64(a, 7)));
            }
            for b in &all {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in &all {
                    assert_eq!(f.mul(a, &f.add(b, c)), f.add(&f.mul(a, b), &f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn inverse_random_large_field() {
        let f = GaloisField::with_degree(7, 12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = f.random(&mut rng);
            if f.is_zero(&a) {
                continue;
            }
            let ai = f.inv(&a).unwrap();
            assert!(f.is_one(&f.mul(&a, &ai)));
        }
    }

    #[test]
    fn index_roundtrip_and_trace() {
        let f = GaloisField::with_degree(3, 2);
        for i in 0..9 {
            assert_eq!(f.to_index_u64(&f.from_index_u64(i)), i);
        }
        let sum: u64 = (0..9).map(|i| f.absolute_trace(&f.from_index_u64(i))).sum();
        assert_eq!(sum, 3 * (0 + 1 + 2));
        let prime = GaloisField::with_degree(7, 1);
        assert_eq!(prime.gen(), prime.zero());
    }
}
