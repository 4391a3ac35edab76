use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::field::{first_irreducible, Field, FieldElement, GaloisField};
use super::poly::{Poly, PolyRing};
use crate::error::{Error, Result};
use crate::intarith::{is_prime_u64, Factorization, Factorizer};
use crate::polyfactor::{explicit_factors, factor_xn_minus_1, ExplicitFactor, XnFactorization};

/// Polynomial over `F_q` with coefficients in the context's base field.
pub type PolyOverFq = Poly<FieldElement>;

/// `F_q` and `F_{q^n}` as flat polynomial-basis fields, with an explicit embedding
/// of the former into the latter.
#[derive(Debug, Clone)]
pub struct FieldContext {
    p: u64,
    k: usize,
    n: usize,
    seed: u64,
    base: GaloisField,
    ext: GaloisField,
    basis_images: Vec<FieldElement>,
    pivots: Vec<usize>,
    pivot_inverse: Vec<Vec<u64>>,
    frob: Vec<Vec<u64>>,
    order_factorization: Factorization,
    generator: Option<FieldElement>,
    xn: XnFactorization,
    xn_factors: Vec<ExplicitFactor>,
    cofactors: Vec<PolyOverFq>,
}

/// JSON descriptor of a context.
#[derive(Debug, Clone, Serialize)]
pub struct ContextDescriptor {
    pub p: u64,
    pub k: usize,
    pub n: usize,
    pub moduli: Moduli,
    pub generator: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Moduli {
    pub q: Vec<u64>,
    pub qn: Vec<u64>,
}

impl FieldContext {
    /// Builds `F_{p^k} <= F_{p^{kn}}` and a primitive element of the larger field.
    pub fn build(p: u64, k: usize, n: usize, seed: u64, factorizer: &Factorizer) -> Result<Self> {
        let ctx = Self::build_without_generator(p, k, n, seed, factorizer)?;
        ctx.with_generator()
    }

    /// As [`FieldContext::build`] but skips the generator search; the order of
    /// the multiplicative group may be only partially factored.
    pub fn build_without_generator(p: u64, k: usize, n: usize, seed: u64, factorizer: &Factorizer) -> Result<Self> {
        if !is_prime_u64(p) || p >= 1 << 32 {
            return Err(Error::NotPrime(p.to_string()));
        }
        if k == 0 || n == 0 {
            return Err(Error::InvalidArgument("k and n must be positive".into()));
        }
        let q = p
            .checked_pow(k as u32)
            .ok_or_else(|| Error::RangeExceeded(format!("{p}^{k}")))?;
        let base = GaloisField::new(p, first_irreducible(p, k));
        let ext = GaloisField::new(p, first_irreducible(p, k * n));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let ring = PolyRing::new(&ext);
        let lifted = Poly::new(base.modulus().iter().map(|&c| ext.from_int(c)).collect());
        let root = ring
            .roots(&lifted, &mut rng)
            .into_iter()
            .next()
            .ok_or_else(|| Error::PrecheckFailed("base modulus has no root in extension".into()))?;
        let mut basis_images = Vec::with_capacity(k);
        let mut cur = ext.one();
        for _ in 0..k {
            basis_images.push(cur.clone());
            cur = ext.mul(&cur, &root);
        }
        let (pivots, pivot_inverse) = left_inverse(p, &basis_images, k);

        let d = k * n;
        let xq = ext.pow(&ext.gen(), &BigUint::from(q));
        let mut frob_cols = Vec::with_capacity(d);
        let mut col = ext.one();
        for _ in 0..d {
            frob_cols.push(col.coeffs.clone());
            col = ext.mul(&col, &xq);
        }
        let frob: Vec<Vec<u64>> = (0..d).map(|i| (0..d).map(|j| frob_cols[j][i]).collect()).collect();

        let order_factorization = factorizer.factorize_power_minus_one(q, n as u64)?;
        let xn = factor_xn_minus_1(q, n as u64)?;
        let xn_factors = explicit_factors(&base, n as u64, seed)?;
        let bring = PolyRing::new(&base);
        let full = bring.x_pow_minus_one(n);
        let cofactors = xn_factors
            .iter()
            .map(|f| bring.exact_div(&full, &f.poly).expect("factor divides x^n - 1"))
            .collect();

        let ctx = Self {
            p,
            k,
            n,
            seed,
            base,
            ext,
            basis_images,
            pivots,
            pivot_inverse,
            frob,
            order_factorization,
            generator: None,
            xn,
            xn_factors,
            cofactors,
        };
        ctx.spot_check_embedding(&mut rng)?;
        Ok(ctx)
    }

    fn with_generator(mut self) -> Result<Self> {
        if !self.order_factorization.is_complete() {
            return Err(Error::BudgetExceeded(self.order_factorization.value().to_string()));
        }
        let size = self.ext.order();
        let mut idx = BigUint::one();
        while idx < size {
            let cand = self.element_from_index(&idx);
            if self.is_primitive(&cand)? {
                self.generator = Some(cand);
                return Ok(self);
            }
            idx += 1u32;
        }
        Err(Error::PrecheckFailed("no primitive element found".into()))
    }

    fn spot_check_embedding(&self, rng: &mut ChaCha8Rng) -> Result<()> {
        let e = |a: &FieldElement| self.embed(a);
        let ok_units = e(&self.base.zero()) == self.ext.zero() && e(&self.base.one()) == self.ext.one();
        let ok_pairs = (0..16).all(|_| {
            let a = self.base.random(rng);
            let b = self.base.random(rng);
            e(&self.base.add(&a, &b)) == self.ext.add(&e(&a), &e(&b))
                && e(&self.base.mul(&a, &b)) == self.ext.mul(&e(&a), &e(&b))
        });
        if ok_units && ok_pairs {
            Ok(())
        } else {
            Err(Error::PrecheckFailed("embedding is not a homomorphism".into()))
        }
    }

    #[must_use]
    pub fn p(&self) -> u64 {
        self.p
    }
    #[must_use]
    pub fn k(&self) -> usize {
        self.k
    }
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }
    #[must_use]
    pub fn q(&self) -> u64 {
        self.p.pow(self.k as u32)
    }
    #[must_use]
    pub fn seed(&self) -> u64 {
        self.seed
    }
    /// `F_q`.
    #[must_use]
    pub fn base(&self) -> &GaloisField {
        &self.base
    }
    /// `F_{q^n}`.
    #[must_use]
    pub fn ext(&self) -> &GaloisField {
        &self.ext
    }
    #[must_use]
    pub fn generator(&self) -> Option<&FieldElement> {
        self.generator.as_ref()
    }
    /// Factorization of `q^n - 1`.
    #[must_use]
    pub fn order_factorization(&self) -> &Factorization {
        &self.order_factorization
    }
    #[must_use]
    pub fn xn_factorization(&self) -> &XnFactorization {
        &self.xn
    }
    /// Distinct monic irreducible factors of `x^n - 1` over `F_q`.
    #[must_use]
    pub fn xn_factors(&self) -> &[ExplicitFactor] {
        &self.xn_factors
    }

    #[must_use]
    pub fn descriptor(&self) -> ContextDescriptor {
        ContextDescriptor {
            p: self.p,
            k: self.k,
            n: self.n,
            moduli: Moduli { q: self.base.modulus().to_vec(), qn: self.ext.modulus().to_vec() },
            generator: self.generator.as_ref().map(|g| g.coeffs.clone()),
        }
    }

    #[must_use]
    pub fn element_from_index(&self, idx: &BigUint) -> FieldElement {
        let mut c = vec![0u64; self.ext.degree()];
        let mut rest = idx.clone();
        for slot in &mut c {
            *slot = (&rest % self.p).try_into().unwrap_or(0);
            rest /= self.p;
        }
        FieldElement { coeffs: c }
    }

    /// Image of `a in F_q` in `F_{q^n}`.
    #[must_use]
    pub fn embed(&self, a: &FieldElement) -> FieldElement {
        let mut acc = self.ext.zero();
        for (c, img) in a.coeffs.iter().zip(&self.basis_images) {
            if *c != 0 {
                acc = self.ext.add(&acc, &self.ext.mul(img, &self.ext.from_int(*c)));
            }
        }
        acc
    }

    /// Preimage under [`FieldContext::embed`], if `y` lies in `F_q`.
    #[must_use]
    pub fn restrict(&self, y: &FieldElement) -> Option<FieldElement> {
        let p = self.p;
        let c: Vec<u64> = self
            .pivot_inverse
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.pivots)
                    .fold(0u64, |acc, (m, &r)| (acc + m * y.coeffs[r]) % p)
            })
            .collect();
        let a = FieldElement { coeffs: c };
        (self.embed(&a) == *y).then_some(a)
    }

    /// `eps -> eps^q`.
    #[must_use]
    pub fn frobenius_once(&self, eps: &FieldElement) -> FieldElement {
        let p = u128::from(self.p);
        let coeffs = self
            .frob
            .iter()
            .map(|row| {
                let s: u128 = row.iter().zip(&eps.coeffs).map(|(&m, &e)| u128::from(m) * u128::from(e)).sum();
                (s % p) as u64
            })
            .collect();
        FieldElement { coeffs }
    }

    /// `eps -> eps^(q^i)`; `i` is taken modulo `n`.
    #[must_use]
    pub fn frobenius(&self, eps: &FieldElement, i: i64) -> FieldElement {
        let steps = i.rem_euclid(self.n as i64);
        (0..steps).fold(eps.clone(), |acc, _| self.frobenius_once(&acc))
    }

    /// `[eps, eps^q, ..., eps^(q^(n-1))]`.
    #[must_use]
    pub fn conjugates(&self, eps: &FieldElement) -> Vec<FieldElement> {
        let mut out = Vec::with_capacity(self.n);
        let mut cur = eps.clone();
        for _ in 0..self.n {
            let next = self.frobenius_once(&cur);
            out.push(cur);
            cur = next;
        }
        out
    }

    fn to_base(&self, y: &FieldElement, what: &str) -> FieldElement {
        self.restrict(y)
            .unwrap_or_else(|| panic!("{what} left the base field; context is inconsistent"))
    }

    /// `Tr_{q^n/q}`.
    #[must_use]
    pub fn trace(&self, eps: &FieldElement) -> FieldElement {
        let s = self.conjugates(eps).iter().fold(self.ext.zero(), |a, c| self.ext.add(&a, c));
        self.to_base(&s, "trace")
    }

    /// `N_{q^n/q}`.
    #[must_use]
    pub fn norm(&self, eps: &FieldElement) -> FieldElement {
        let s = self.conjugates(eps).iter().fold(self.ext.one(), |a, c| self.ext.mul(&a, c));
        self.to_base(&s, "norm")
    }

    /// `sum_i prod_{j != i} eps^(q^j)`.
    pub fn prenorm(&self, eps: &FieldElement) -> Result<FieldElement> {
        if self.n < 2 {
            return Err(Error::InvalidArgument("prenorm requires n >= 2".into()));
        }
        if self.ext.is_zero(eps) {
            return Err(Error::ZeroElement("prenorm"));
        }
        let conj = self.conjugates(eps);
        let n = conj.len();
        let mut prefix = vec![self.ext.one(); n + 1];
        for i in 0..n {
            prefix[i + 1] = self.ext.mul(&prefix[i], &conj[i]);
        }
        let mut suffix = self.ext.one();
        let mut sum = self.ext.zero();
        for i in (0..n).rev() {
            sum = self.ext.add(&sum, &self.ext.mul(&prefix[i], &suffix));
            suffix = self.ext.mul(&suffix, &conj[i]);
        }
        Ok(self.to_base(&sum, "prenorm"))
    }

    fn group_order(&self) -> BigUint {
        self.ext.order() - 1u32
    }

    /// Multiplicative order by divisor descent.
    pub fn element_order(&self, eps: &FieldElement) -> Result<BigUint> {
        if self.ext.is_zero(eps) {
            return Err(Error::ZeroElement("multiplicative order"));
        }
        self.order_factorization.require_complete()?;
        let mut ord = self.group_order();
        for (l, _) in self.order_factorization.factors() {
            while (&ord % l).is_zero() && self.ext.is_one(&self.ext.pow(eps, &(&ord / l))) {
                ord /= l;
            }
        }
        Ok(ord)
    }

    pub fn is_primitive(&self, eps: &FieldElement) -> Result<bool> {
        let f = self.order_factorization.clone();
        self.is_e_free(eps, &f)
    }

    /// `eps^((q^n-1)/l) != 1` for every prime `l | e`.
    pub fn is_e_free(&self, eps: &FieldElement, e: &Factorization) -> Result<bool> {
        e.require_complete()?;
        let order = self.group_order();
        if !(&order % e.value()).is_zero() {
            return Err(Error::InvalidArgument(format!("{} does not divide q^n - 1", e.value())));
        }
        if self.ext.is_zero(eps) {
            return Ok(e.value().is_one());
        }
        Ok(e.factors()
            .iter()
            .all(|(l, _)| !self.ext.is_one(&self.ext.pow(eps, &(&order / l)))))
    }

    /// `h o eps = sum a_i eps^(q^i)`.
    #[must_use]
    pub fn module_action(&self, h: &PolyOverFq, eps: &FieldElement) -> FieldElement {
        let mut acc = self.ext.zero();
        let mut cur = eps.clone();
        for (i, a) in h.coeffs.iter().enumerate() {
            if i > 0 {
                cur = self.frobenius_once(&cur);
            }
            if !self.base.is_zero(a) {
                acc = self.ext.add(&acc, &self.ext.mul(&self.embed(a), &cur));
            }
        }
        acc
    }

    fn product_of_factors(&self, exps: &[u64]) -> PolyOverFq {
        let ring = PolyRing::new(&self.base);
        exps.iter()
            .zip(&self.xn_factors)
            .fold(ring.one(), |acc, (&e, f)| ring.mul(&acc, &ring.pow(&f.poly, e as u32)))
    }

    /// Exponents of the `F_q`-order over [`FieldContext::xn_factors`].
    #[must_use]
    pub fn fq_order_exponents(&self, eps: &FieldElement) -> Vec<u64> {
        let mut exps: Vec<u64> = self.xn_factors.iter().map(|f| f.multiplicity).collect();
        for j in 0..exps.len() {
            while exps[j] > 0 {
                exps[j] -= 1;
                let trial = self.product_of_factors(&exps);
                if !self.ext.is_zero(&self.module_action(&trial, eps)) {
                    exps[j] += 1;
                    break;
                }
            }
        }
        exps
    }

    /// Minimal monic divisor of `x^n - 1` annihilating `eps`.
    #[must_use]
    pub fn fq_order(&self, eps: &FieldElement) -> PolyOverFq {
        self.product_of_factors(&self.fq_order_exponents(eps))
    }

    /// Indices into [`FieldContext::xn_factors`] of the irreducibles dividing `g`.
    #[must_use]
    pub fn factors_dividing(&self, g: &PolyOverFq) -> Vec<usize> {
        let ring = PolyRing::new(&self.base);
        self.xn_factors
            .iter()
            .enumerate()
            .filter(|(_, f)| ring.is_zero(&ring.rem(g, &f.poly)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Freeness with respect to the listed factors of `x^n - 1`.
    #[must_use]
    pub fn is_free_for(&self, eps: &FieldElement, factor_indices: &[usize]) -> bool {
        factor_indices
            .iter()
            .all(|&j| !self.ext.is_zero(&self.module_action(&self.cofactors[j], eps)))
    }

    /// `((x^n-1)/h) o eps != 0` for each monic irreducible `h | g`.
    #[must_use]
    pub fn is_g_free(&self, eps: &FieldElement, g: &PolyOverFq) -> bool {
        self.is_free_for(eps, &self.factors_dividing(g))
    }

    #[must_use]
    pub fn is_normal(&self, eps: &FieldElement) -> bool {
        let all: Vec<usize> = (0..self.xn_factors.len()).collect();
        self.is_free_for(eps, &all)
    }

    /// `(x^n - 1) / h` for the `j`-th distinct factor `h`.
    #[must_use]
    pub fn cofactor(&self, j: usize) -> &PolyOverFq {
        &self.cofactors[j]
    }

    /// Product of `x - c` over the distinct conjugates of `eps`, with coefficients in `F_q`.
    #[must_use]
    pub fn minimal_polynomial(&self, eps: &FieldElement) -> PolyOverFq {
        let ring = PolyRing::new(&self.ext);
        let mut orbit = vec![eps.clone()];
        loop {
            let next = self.frobenius_once(orbit.last().unwrap());
            if next == orbit[0] {
                break;
            }
            orbit.push(next);
        }
        let prod = orbit.iter().fold(ring.one(), |acc, c| {
            ring.mul(&acc, &Poly::new(vec![self.ext.neg(c), self.ext.one()]))
        });
        Poly::new(prod.coeffs.iter().map(|c| self.to_base(c, "minimal polynomial")).collect())
    }

    /// `F_p`-matrix (row-major, `D x D`) of `eps -> h o eps`.
    #[must_use]
    pub fn action_matrix(&self, h: &PolyOverFq) -> Vec<Vec<u64>> {
        let d = self.ext.degree();
        let cols: Vec<Vec<u64>> = (0..d)
            .map(|j| {
                let mut e = self.ext.zero();
                e.coeffs[j] = 1;
                self.module_action(h, &e).coeffs
            })
            .collect();
        (0..d).map(|i| (0..d).map(|j| cols[j][i]).collect()).collect()
    }
}

/// Row indices and inverse of an invertible `k x k` submatrix of the `D x k` matrix with the given columns.
fn left_inverse(p: u64, columns: &[FieldElement], k: usize) -> (Vec<usize>, Vec<Vec<u64>>) {
    let d = columns[0].coeffs.len();
    let inv = |a: u64| crate::ffield::PrimeField::new(p).inv(&a).expect("nonzero pivot");
    let mut rows: Vec<Vec<u64>> = (0..d).map(|i| (0..k).map(|j| columns[j].coeffs[i]).collect()).collect();
    let mut pivots = Vec::with_capacity(k);
    let mut used = vec![false; d];
    for col in 0..k {
        let r = (0..d)
            .find(|&r| !used[r] && rows[r][col] != 0)
            .expect("embedding images are independent");
        used[r] = true;
        pivots.push(r);
        let pinv = inv(rows[r][col]);
        let pivot_row = rows[r].clone();
        for (rr, row) in rows.iter_mut().enumerate() {
            if rr == r || row[col] == 0 {
                continue;
            }
            let f = row[col] * pinv % p;
            for c in 0..k {
                row[c] = (row[c] + p - f * pivot_row[c] % p) % p;
            }
        }
    }
    // Invert the selected submatrix by Gauss-Jordan.
    let mut a: Vec<Vec<u64>> = pivots.iter().map(|&r| (0..k).map(|j| columns[j].coeffs[r]).collect()).collect();
    let mut b: Vec<Vec<u64>> = (0..k).map(|i| (0..k).map(|j| u64::from(i == j)).collect()).collect();
    for col in 0..k {
        let r = (col..k).find(|&r| a[r][col] != 0).expect("invertible");
        a.swap(col, r);
        b.swap(col, r);
        let pinv = inv(a[col][col]);
        for c in 0..k {
            a[col][c] = a[col][c] * pinv % p;
            b[col][c] = b[col][c] * pinv % p;
        }
        for rr in 0..k {
            if rr != col && a[rr][col] != 0 {
                let f = a[rr][col];
                for c in 0..k {
                    a[rr][c] = (a[rr][c] + p - f * a[col][c] % p) % p;
                    b[rr][c] = (b[rr][c] + p - f * b[col][c] % p) % p;
                }
            }
        }
    }
    (pivots, b)
}
