//! Exhaustive verification on small fields.
//!
//! [`CharacterTable`] tabulates discrete logarithms and traces of `F_{q^n}` so
//! that the characteristic functions of e-free, g-free, trace and norm classes
//! can be evaluated as explicit character sums and compared with the direct
//! predicates of [`crate::ffield`].

mod count;
mod weil;

use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_complex::Complex;
use num_traits::{Float, ToPrimitive, Zero};
use rayon::prelude::*;
use rustfft::FftNum;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffield::{Field, FieldContext, FieldElement, PolyOverFq, PolyRing};
use crate::intarith::{perfect_power_root, Factorization, Factorizer};

pub use count::{
    count_direct, count_direct_all, count_direct_with, count_pairs, count_prenorm, count_via_characters, CharacterCount, FreenessConditions,
    OracleRecord,
};
pub use weil::{
    weil_check_mixed, weil_check_multiplicative, weil_scan_mixed, weil_scan_multiplicative, AdditiveArgument,
    WeilFunction, WeilRecord,
};

/// Largest field the tables are built for.
pub const MAX_TABLE_SIZE: u64 = 1_000_000;
/// Rounding residue above which a character sum is rejected.
pub const RESIDUE_LIMIT: f64 = 1e-4;

/// A character-sum value rounded to `0` or `1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Indicator {
    pub value: bool,
    /// Distance of the complex sum from the returned value.
    pub residue: f64,
}

/// Discrete logarithms, traces and roots of unity for one field `F_{q^n}`.
///
/// Elements are addressed by their base-`p` index in the polynomial basis of
/// [`FieldContext::ext`].
#[derive(Debug)]
pub struct CharacterTable<T> {
    ctx: FieldContext,
    size: u64,
    exp: Vec<u32>,
    log: Vec<u32>,
    abs_trace: Vec<u32>,
    base_to_ext: Vec<u32>,
    base_abs_trace: Vec<u32>,
    base_log: Vec<u32>,
    roots: Vec<Complex<T>>,
    roots_p: Vec<Complex<T>>,
    factor_degrees: Vec<u64>,
    additive_orders: OnceLock<Vec<Option<u64>>>,
}

impl<T: Float + FftNum> CharacterTable<T> {
    /// Builds `F_q <= F_{q^n}` and tabulates it.
    pub fn for_field(q: u64, n: u64, factorizer: &Factorizer) -> Result<Self> {
        let (p, k) = perfect_power_root(q);
        let size = BigUint::from(q).pow(n as u32);
        if size > BigUint::from(MAX_TABLE_SIZE) {
            return Err(Error::RangeExceeded(format!("{q}^{n} exceeds {MAX_TABLE_SIZE}")));
        }
        Self::new(FieldContext::build(p, k as usize, n as usize, 0, factorizer)?)
    }

    pub fn new(ctx: FieldContext) -> Result<Self> {
        let ext = ctx.ext();
        let size = ext
            .size_u64()
            .filter(|&s| s <= MAX_TABLE_SIZE)
            .ok_or_else(|| Error::RangeExceeded("field too large for a character table".into()))?;
        let gamma = ctx
            .generator()
            .cloned()
            .ok_or_else(|| Error::PrecheckFailed("context has no generator".into()))?;
        let order = size - 1;
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![u32::MAX; size as usize];
        let mut cur = ext.one();
        for (k, slot) in exp.iter_mut().enumerate() {
            let idx = ext.to_index_u64(&cur);
            if log[idx as usize] != u32::MAX {
                return Err(Error::PrecheckFailed("generator is not primitive".into()));
            }
            *slot = idx as u32;
            log[idx as usize] = k as u32;
            cur = ext.mul(&cur, &gamma);
        }

        let p = ctx.p();
        let basis_traces: Vec<u64> = (0..ext.degree())
            .map(|i| {
                let mut c = vec![0u64; ext.degree()];
                c[i] = 1;
                ext.absolute_trace(&FieldElement { coeffs: c })
            })
            .collect();
        let trace_of = |idx: u64, traces: &[u64]| {
            let mut rest = idx;
            let mut acc = 0;
            for t in traces {
                acc = (acc + (rest % p) * t) % p;
                rest /= p;
            }
            acc as u32
        };
        let abs_trace: Vec<u32> = (0..size).map(|i| trace_of(i, &basis_traces)).collect();

        let base = ctx.base();
        let q = base.size_u64().expect("base field is small");
        let step = order / (q - 1);
        let base_to_ext: Vec<u32> = (0..q)
            .map(|i| ext.to_index_u64(&ctx.embed(&base.from_index_u64(i))) as u32)
            .collect();
        let base_abs_trace = (0..q).map(|i| base.absolute_trace(&base.from_index_u64(i)) as u32).collect();
        let base_log = base_to_ext
            .iter()
            .map(|&e| if e == 0 { u32::MAX } else { (u64::from(log[e as usize]) / step) as u32 })
            .collect();

        let roots = unit_roots(order);
        let roots_p = unit_roots(p);
        let factor_degrees = ctx.xn_factors().iter().map(|f| f.poly.coeffs.len() as u64 - 1).collect();
        Ok(Self {
            ctx,
            size,
            exp,
            log,
            abs_trace,
            base_to_ext,
            base_abs_trace,
            base_log,
            roots,
            roots_p,
            factor_degrees,
            additive_orders: OnceLock::new(),
        })
    }

    #[must_use]
    pub fn context(&self) -> &FieldContext {
        &self.ctx
    }

    /// `q^n`.
    #[must_use]
    pub fn size(&self) -> u64 {
        self.size
    }

    fn order(&self) -> u64 {
        self.size - 1
    }

    fn q(&self) -> u64 {
        self.base_to_ext.len() as u64
    }

    #[must_use]
    pub fn index(&self, eps: &FieldElement) -> u64 {
        self.ctx.ext().to_index_u64(eps)
    }

    #[must_use]
    pub fn element(&self, idx: u64) -> FieldElement {
        self.ctx.ext().from_index_u64(idx)
    }

    /// Discrete logarithm to the base of the context generator.
    pub fn dlog(&self, eps: &FieldElement) -> Result<u64> {
        self.dlog_index(self.index(eps))
    }

    fn dlog_index(&self, idx: u64) -> Result<u64> {
        match self.log[idx as usize] {
            u32::MAX => Err(Error::ZeroElement("discrete logarithm")),
            k => Ok(u64::from(k)),
        }
    }

    /// Index of `generator^k`.
    #[must_use]
    pub fn power_index(&self, k: u64) -> u64 {
        u64::from(self.exp[(k % self.order()) as usize])
    }

    fn mul_index(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = u64::from(self.log[a as usize]) + u64::from(self.log[b as usize]);
        self.power_index(k)
    }

    fn inv_index(&self, a: u64) -> u64 {
        self.power_index(self.order() - u64::from(self.log[a as usize]))
    }

    /// `e^(2 pi i k / (q^n - 1))`.
    fn root(&self, k: u64) -> Complex<T> {
        self.roots[(k % self.order()) as usize]
    }

    /// Canonical additive character of `F_{q^n}`, `e^(2 pi i Tr_{q^n/p}(eps) / p)`, by index.
    fn psi(&self, idx: u64) -> Complex<T> {
        self.roots_p[self.abs_trace[idx as usize] as usize]
    }

    /// Canonical additive character of `F_q`, by base index.
    fn lambda0(&self, base_idx: u64) -> Complex<T> {
        self.roots_p[self.base_abs_trace[base_idx as usize] as usize]
    }

    /// Multiplicative character `chi_c(g^k) = e^(2 pi i c k / (q^n - 1))`, extended by `chi(0) = 0`
    /// for nontrivial `chi`.
    #[must_use]
    pub fn multiplicative(&self, c: u64, eps: &FieldElement) -> Complex<T> {
        let idx = self.index(eps);
        if idx == 0 {
            return if c % self.order() == 0 { Complex::new(T::one(), T::zero()) } else { Complex::zero() };
        }
        self.root(c * u64::from(self.log[idx as usize]))
    }

    /// Additive character `lambda_y(eps) = psi(y eps)`.
    #[must_use]
    pub fn additive(&self, y: &FieldElement, eps: &FieldElement) -> Complex<T> {
        self.psi(self.mul_index(self.index(y), self.index(eps)))
    }

    /// Sum of all characters of order exactly `d` at `eps != 0` (`d` squarefree).
    fn order_sum(&self, d: u64, k: u64) -> Complex<T> {
        let step = self.order() / d;
        let mut acc = Complex::zero();
        for t in 1..=d {
            if num_integer::gcd(t, d) == 1 {
                acc = acc + self.root(step * t % self.order() * (k % d));
            }
        }
        acc
    }

    /// `F_q`-order of `lambda_y` for every `y`, as a bitmask over
    /// [`FieldContext::xn_factors`]; `None` where the order is not squarefree.
    fn additive_orders(&self) -> Result<&[Option<u64>]> {
        if self.factor_degrees.len() > 63 {
            return Err(Error::RangeExceeded("too many factors of x^n - 1".into()));
        }
        Ok(self.additive_orders.get_or_init(|| {
            let sigma = self.reciprocal_permutation();
            (0..self.size)
                .into_par_iter()
                .map(|i| {
                    let exps = self.ctx.fq_order_exponents(&self.element(i));
                    let mut mask = 0u64;
                    for (j, &e) in exps.iter().enumerate() {
                        match e {
                            0 => {}
                            1 => mask |= 1 << sigma[j],
                            _ => return None,
                        }
                    }
                    Some(mask)
                })
                .collect()
        }))
    }

    /// `lambda_y(h o eps) = lambda_{h* o y}(eps)` with `h*` the reciprocal of `h`, so the
    /// factor `f_j` of the order of `y` becomes factor `sigma[j]` of the order of `lambda_y`.
    fn reciprocal_permutation(&self) -> Vec<usize> {
        let base = self.ctx.base();
        let ring = PolyRing::new(base);
        let factors = self.ctx.xn_factors();
        factors
            .iter()
            .map(|f| {
                let rev: Vec<FieldElement> = f.poly.coeffs.iter().rev().cloned().collect();
                let rec = ring.monic(&crate::ffield::Poly::new(rev));
                factors.iter().position(|g| g.poly == rec).expect("x^n - 1 is self-reciprocal")
            })
            .collect()
    }

    fn support_mask(&self, g: &PolyOverFq) -> Result<u64> {
        let ring = PolyRing::new(self.ctx.base());
        let xn = ring.x_pow_minus_one(self.ctx.n());
        if ring.is_zero(g) || !ring.is_zero(&ring.rem(&xn, g)) {
            return Err(Error::InvalidArgument("g does not divide x^n - 1".into()));
        }
        Ok(self.ctx.factors_dividing(g).iter().fold(0u64, |m, &j| m | 1 << j))
    }

    /// `Theta(g)` and the weight `mu_q(h) / Phi_q(h)` of a squarefree `h` given by bitmask.
    fn mask_weight(&self, mask: u64) -> (f64, f64) {
        let q = self.q() as f64;
        let mut theta = 1.0;
        let mut phi = 1.0;
        for (j, &d) in self.factor_degrees.iter().enumerate() {
            if mask >> j & 1 == 1 {
                let qd = q.powi(d as i32);
                theta *= 1.0 - 1.0 / qd;
                phi *= qd - 1.0;
            }
        }
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        (theta, sign / phi)
    }

    fn cst(&self, v: f64) -> T {
        T::from(v).expect("float conversion")
    }

    /// e-free indicator evaluated as a sum over multiplicative characters.
    pub fn rho(&self, eps: &FieldElement, e: &Factorization) -> Result<Indicator> {
        let idx = self.index(eps);
        if idx == 0 {
            return Err(Error::ZeroElement("rho"));
        }
        let k = u64::from(self.log[idx as usize]);
        let sum = self.rho_sum(k, e)?;
        indicator(sum, "rho")
    }

    fn rho_sum(&self, k: u64, e: &Factorization) -> Result<Complex<T>> {
        let primes = self.divisor_primes(e)?;
        let mut acc = Complex::zero();
        let mut theta = 1.0;
        for p in &primes {
            theta *= 1.0 - 1.0 / *p as f64;
        }
        for mask in 0u32..1 << primes.len() {
            let (d, phi) = squarefree_from_mask(&primes, mask);
            let mu = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc = acc + self.order_sum(d, k) * self.cst(mu / phi as f64);
        }
        Ok(acc * self.cst(theta))
    }

    fn divisor_primes(&self, e: &Factorization) -> Result<Vec<u64>> {
        e.require_complete()?;
        if !(BigUint::from(self.order()) % e.value()).is_zero() {
            return Err(Error::InvalidArgument(format!("{} does not divide q^n - 1", e.value())));
        }
        Ok(e.factors().iter().map(|(p, _)| p.to_u64().expect("divides a small order")).collect())
    }

    /// g-free indicator evaluated as a sum over additive characters.
    pub fn kappa(&self, eps: &FieldElement, g: &PolyOverFq) -> Result<Indicator> {
        let mask = self.support_mask(g)?;
        let sum = self.kappa_sum(self.index(eps), mask)?;
        indicator(sum, "kappa")
    }

    fn kappa_sum(&self, idx: u64, mask: u64) -> Result<Complex<T>> {
        let orders = self.additive_orders()?;
        let mut acc = Complex::zero();
        for (y, ord) in orders.iter().enumerate() {
            if let Some(h) = *ord {
                if h & !mask == 0 {
                    let (_, w) = self.mask_weight(h);
                    acc = acc + self.psi(self.mul_index(y as u64, idx)) * self.cst(w);
                }
            }
        }
        Ok(acc * self.cst(self.mask_weight(mask).0))
    }

    /// Trace indicator `Tr(eps) = a` as a sum over additive characters of `F_q`.
    pub fn tau(&self, eps: &FieldElement, a: &FieldElement) -> Result<Indicator> {
        let base = self.ctx.base();
        let e = self.index(eps);
        let mut acc = Complex::zero();
        for t in 0..self.q() {
            let te = self.mul_index(u64::from(self.base_to_ext[t as usize]), e);
            let ta = base.to_index_u64(&base.neg(&base.mul(&base.from_index_u64(t), a)));
            acc = acc + self.psi(te) * self.lambda0(ta);
        }
        indicator(acc / self.cst(self.q() as f64), "tau")
    }

    /// Norm indicator `N(eps) = c` as a sum over multiplicative characters of `F_q^*`.
    pub fn eta(&self, eps: &FieldElement, c: &FieldElement) -> Result<Indicator> {
        let idx = self.index(eps);
        if idx == 0 {
            return Err(Error::ZeroElement("eta"));
        }
        let j = self.base_log_of(c)?;
        let k = u64::from(self.log[idx as usize]);
        let q1 = self.q() - 1;
        let step = self.order() / q1;
        let mut acc = Complex::zero();
        for i in 1..=q1 {
            // chi~^i(eps) chi_{q-1}(c^-i)
            acc = acc + self.root(step * i % self.order() * k) * self.root(self.order() - step * i * j % self.order());
        }
        indicator(acc / self.cst(q1 as f64), "eta")
    }

    /// Discrete log of `c in F_q^*` to the base `N(generator)`.
    fn base_log_of(&self, c: &FieldElement) -> Result<u64> {
        match self.base_log[self.ctx.base().to_index_u64(c) as usize] {
            u32::MAX => Err(Error::ZeroElement("norm class")),
            j => Ok(u64::from(j)),
        }
    }
}

fn unit_roots<T: Float>(m: u64) -> Vec<Complex<T>> {
    (0..m)
        .map(|k| {
            let a = TAU * k as f64 / m as f64;
            Complex::new(T::from(a.cos()).unwrap(), T::from(a.sin()).unwrap())
        })
        .collect()
}

fn squarefree_from_mask(primes: &[u64], mask: u32) -> (u64, u64) {
    let mut d = 1;
    let mut phi = 1;
    for (i, p) in primes.iter().enumerate() {
        if mask >> i & 1 == 1 {
            d *= p;
            phi *= p - 1;
        }
    }
    (d, phi)
}

/// Rounds a character sum and measures how far it was from an integer.
fn round_sum<T: Float>(sum: Complex<T>, context: &str) -> Result<(i64, f64)> {
    let re = sum.re.to_f64().unwrap_or(f64::NAN);
    let im = sum.im.to_f64().unwrap_or(f64::NAN);
    let r = re.round();
    let residue = (re - r).abs().max(im.abs());
    if !(residue <= RESIDUE_LIMIT) {
        return Err(Error::NumericalInstability { residue, context: context.into() });
    }
    Ok((r as i64, residue))
}

fn indicator<T: Float>(sum: Complex<T>, context: &str) -> Result<Indicator> {
    let (v, residue) = round_sum(sum, context)?;
    match v {
        0 | 1 => Ok(Indicator { value: v == 1, residue }),
        _ => {
            let residue = if v < 0 { -v } else { v - 1 } as f64;
            Err(Error::NumericalInstability { residue, context: context.into() })
        }
    }
}

/// Sums in a fixed binary tree so the result does not depend on thread scheduling.
pub(crate) fn tree_sum<T: FftNum>(values: &[Complex<T>]) -> Complex<T> {
    const LEAF: usize = 4096;
    if values.len() <= LEAF {
        return values.iter().fold(Complex::zero(), |a, b| a + b);
    }
    let (l, r) = values.split_at(values.len() / 2);
    let (a, b) = rayon::join(|| tree_sum(l), || tree_sum(r));
    a + b
}
