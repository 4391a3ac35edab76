//! Dense univariate polynomials over any [`Field`].

use num_bigint::BigUint;
use rand::Rng;

use super::field::Field;
use crate::intarith::factor_u64;

/// Coefficients low degree first, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly<E> {
    pub coeffs: Vec<E>,
}

impl<E> Poly<E> {
    /// Wraps raw coefficients; call [`PolyRing::trim`] when zeros may trail.
    #[must_use]
    pub fn new(coeffs: Vec<E>) -> Self {
        Self { coeffs }
    }
}

impl Poly<u64> {
    /// Drops trailing zero coefficients of an `F_p` polynomial.
    #[must_use]
    pub fn trimmed(mut self) -> Self {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        self
    }
}

/// Polynomial operations over a borrowed field.
#[derive(Debug, Clone, Copy)]
pub struct PolyRing<'f, F: Field> {
    pub field: &'f F,
}

impl<'f, F: Field> PolyRing<'f, F> {
    #[must_use]
    pub fn new(field: &'f F) -> Self {
        Self { field }
    }

    pub fn trim(&self, mut a: Poly<F::Elem>) -> Poly<F::Elem> {
        while a.coeffs.last().is_some_and(|c| self.field.is_zero(c)) {
            a.coeffs.pop();
        }
        a
    }

    pub fn zero(&self) -> Poly<F::Elem> {
        Poly::new(Vec::new())
    }

    pub fn one(&self) -> Poly<F::Elem> {
        Poly::new(vec![self.field.one()])
    }

    pub fn x(&self) -> Poly<F::Elem> {
        Poly::new(vec![self.field.zero(), self.field.one()])
    }

    pub fn constant(&self, c: F::Elem) -> Poly<F::Elem> {
        self.trim(Poly::new(vec![c]))
    }

    /// `c x^k`.
    pub fn monomial(&self, c: F::Elem, k: usize) -> Poly<F::Elem> {
        let mut v = vec![self.field.zero(); k];
        v.push(c);
        self.trim(Poly::new(v))
    }

    /// `x^k - 1`.
    pub fn x_pow_minus_one(&self, k: usize) -> Poly<F::Elem> {
        let mut v = vec![self.field.zero(); k + 1];
        v[0] = self.field.neg(&self.field.one());
        v[k] = self.field.add(&v[k], &self.field.one());
        self.trim(Poly::new(v))
    }

    pub fn is_zero(&self, a: &Poly<F::Elem>) -> bool {
        a.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self, a: &Poly<F::Elem>) -> Option<usize> {
        a.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self, a: &Poly<F::Elem>) -> Option<F::Elem> {
        a.coeffs.last().cloned()
    }

    pub fn add(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
        let n = a.coeffs.len().max(b.coeffs.len());
        let z = self.field.zero();
        let v = (0..n)
            .map(|i| self.field.add(a.coeffs.get(i).unwrap_or(&z), b.coeffs.get(i).unwrap_or(&z)))
            .collect();
        self.trim(Poly::new(v))
    }

    pub fn sub(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Poly<F::Elem>) -> Poly<F::Elem> {
        Poly::new(a.coeffs.iter().map(|c| self.field.neg(c)).collect())
    }

    pub fn scale(&self, a: &Poly<F::Elem>, c: &F::Elem) -> Poly<F::Elem> {
        self.trim(Poly::new(a.coeffs.iter().map(|x| self.field.mul(x, c)).collect()))
    }

    pub fn mul(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
        if a.coeffs.is_empty() || b.coeffs.is_empty() {
            return self.zero();
        }
        let mut v = vec![self.field.zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if self.field.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                v[i + j] = self.field.add(&v[i + j], &self.field.mul(x, y));
            }
        }
        self.trim(Poly::new(v))
    }

    pub fn pow(&self, a: &Poly<F::Elem>, e: u32) -> Poly<F::Elem> {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> (Poly<F::Elem>, Poly<F::Elem>) {
        let db = self.degree(b).expect("division by zero polynomial");
        let lead_inv = self.field.inv(b.coeffs.last().unwrap()).unwrap();
        let mut r = a.coeffs.clone();
        if r.len() <= db {
            return (self.zero(), self.trim(Poly::new(r)));
        }
        let mut q = vec![self.field.zero(); r.len() - db];
        for k in (db..r.len()).rev() {
            if self.field.is_zero(&r[k]) {
                continue;
            }
            let c = self.field.mul(&r[k], &lead_inv);
            for (j, bj) in b.coeffs.iter().enumerate() {
                let t = self.field.mul(&c, bj);
                r[k - db + j] = self.field.sub(&r[k - db + j], &t);
            }
            q[k - db] = c;
        }
        r.truncate(db);
        (self.trim(Poly::new(q)), self.trim(Poly::new(r)))
    }

    pub fn rem(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
        self.divrem(a, b).1
    }

    /// `a / b` when `b | a`.
    pub fn exact_div(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Option<Poly<F::Elem>> {
        let (q, r) = self.divrem(a, b);
        self.is_zero(&r).then_some(q)
    }

    pub fn monic(&self, a: &Poly<F::Elem>) -> Poly<F::Elem> {
        match a.coeffs.last() {
            None => self.zero(),
            Some(l) => self.scale(a, &self.field.inv(l).unwrap()),
        }
    }

    /// Monic gcd (zero when both inputs are zero).
    pub fn gcd(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !self.is_zero(&b) {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// `(g, s, t)` with `s a + t b = g` (not normalized).
    pub fn xgcd(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> (Poly<F::Elem>, Poly<F::Elem>, Poly<F::Elem>) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (self.one(), self.zero());
        let (mut t0, mut t1) = (self.zero(), self.one());
        while !self.is_zero(&r1) {
            let (q, r) = self.divrem(&r0, &r1);
            let s2 = self.sub(&s0, &self.mul(&q, &s1));
            let t2 = self.sub(&t0, &self.mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        (r0, s0, t0)
    }

    pub fn mulmod(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>, m: &Poly<F::Elem>) -> Poly<F::Elem> {
        self.rem(&self.mul(a, b), m)
    }

    pub fn powmod(&self, base: &Poly<F::Elem>, e: &BigUint, m: &Poly<F::Elem>) -> Poly<F::Elem> {
        let base = self.rem(base, m);
        let mut acc = self.rem(&self.one(), m);
        for i in (0..e.bits()).rev() {
            acc = self.mulmod(&acc, &acc, m);
            if e.bit(i) {
                acc = self.mulmod(&acc, &base, m);
            }
        }
        acc
    }

    pub fn eval(&self, a: &Poly<F::Elem>, x: &F::Elem) -> F::Elem {
        a.coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, c| self.field.add(&self.field.mul(&acc, x), c))
    }

    pub fn derivative(&self, a: &Poly<F::Elem>) -> Poly<F::Elem> {
        let v = a
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| self.field.mul(c, &self.field.from_int(i as u64)))
            .collect();
        self.trim(Poly::new(v))
    }

    /// Rabin's test: `x^(Q^d) = x mod f` and `gcd(x^(Q^(d/l)) - x, f) = 1` for primes `l | d`.
    pub fn is_irreducible(&self, f: &Poly<F::Elem>) -> bool {
        let Some(d) = self.degree(f) else { return false };
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let q = self.field.order();
        let x = self.x();
        let mut powers = Vec::with_capacity(d + 1);
        let mut cur = self.rem(&x, f);
        powers.push(cur.clone());
        for _ in 0..d {
            cur = self.powmod(&cur, &q, f);
            powers.push(cur.clone());
        }
        if powers[d] != self.rem(&x, f) {
            return false;
        }
        factor_u64(d as u64).iter().all(|&(l, _)| {
            let k = d / l as usize;
            let g = self.gcd(&self.sub(&powers[k], &x), f);
            self.degree(&g) == Some(0)
        })
    }

    fn random_poly<R: Rng + ?Sized>(&self, deg_below: usize, rng: &mut R) -> Poly<F::Elem> {
        self.trim(Poly::new((0..deg_below).map(|_| self.field.random(rng)).collect()))
    }

    /// Splits a monic squarefree `f` whose irreducible factors all have degree `d`
    /// (Cantor-Zassenhaus). Factors are returned monic and sorted.
    pub fn equal_degree_factors<R: Rng + ?Sized>(&self, f: &Poly<F::Elem>, d: usize, rng: &mut R) -> Vec<Poly<F::Elem>>
    where
        F::Elem: Ord,
    {
        let mut done = Vec::new();
        let mut todo = vec![self.monic(f)];
        let q = self.field.order();
        let p = self.field.characteristic();
        let odd_exp = (q.pow(d as u32) - 1u32) >> 1;
        while let Some(g) = todo.pop() {
            let n = self.degree(&g).unwrap_or(0);
            if n == d {
                done.push(g);
                continue;
            }
            if n == 0 {
                continue;
            }
            loop {
                let a = self.random_poly(n, rng);
                if self.degree(&a).unwrap_or(0) == 0 {
                    continue;
                }
                let b = if p == 2 {
                    let bits = self.field.degree() * d;
                    let mut t = a.clone();
                    let mut acc = a.clone();
                    for _ in 1..bits {
                        t = self.mulmod(&t, &t, &g);
                        acc = self.add(&acc, &t);
                    }
                    acc
                } else {
                    self.sub(&self.powmod(&a, &odd_exp, &g), &self.one())
                };
                let h = self.gcd(&b, &g);
                let dh = self.degree(&h).unwrap_or(0);
                if dh > 0 && dh < n {
                    let other = self.exact_div(&g, &h).unwrap();
                    todo.push(h);
                    todo.push(self.monic(&other));
                    break;
                }
            }
        }
        done.sort_by(|a, b| a.coeffs.cmp(&b.coeffs));
        done
    }

    /// Distinct roots of `f` in the field, sorted.
    pub fn roots<R: Rng + ?Sized>(&self, f: &Poly<F::Elem>, rng: &mut R) -> Vec<F::Elem>
    where
        F::Elem: Ord,
    {
        let x = self.x();
        let xq = self.powmod(&x, &self.field.order(), f);
        let split = self.gcd(&self.sub(&xq, &x), f);
        if self.degree(&split).unwrap_or(0) == 0 {
            return Vec::new();
        }
        let mut out: Vec<F::Elem> = self
            .equal_degree_factors(&split, 1, rng)
            .into_iter()
            .map(|lin| self.field.neg(&lin.coeffs[0]))
            .collect();
        out.sort();
        out
    }

    pub fn is_one(&self, a: &Poly<F::Elem>) -> bool {
        a.coeffs.len() == 1 && self.field.is_one(&a.coeffs[0])
    }
}

impl<E: Clone> Poly<E> {
    #[must_use]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}
