use num_bigint::BigUint;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{Float, ToPrimitive, Zero};
use rayon::prelude::*;
use rustfft::FftNum;
use serde::Serialize;

use super::{round_sum, squarefree_from_mask, tree_sum, CharacterTable};
use crate::error::{Error, Result};
use crate::ffield::{Field, FieldContext, FieldElement, PolyOverFq, PolyRing, RationalFunction, RationalValue};
use crate::intarith::{coprime_part_q, theta, Factorization};

/// Freeness requirements: `eps` is `Q_{e1}`-free and `g1`-free, `f(eps)` is `e2`-free and `g2`-free.
#[derive(Debug, Clone)]
pub struct FreenessConditions {
    pub e1: Factorization,
    pub e2: Factorization,
    pub g1: PolyOverFq,
    pub g2: PolyOverFq,
}

impl FreenessConditions {
    /// `e1 = e2 = q^n - 1`, `g1 = g2 = x^n - 1`.
    #[must_use]
    pub fn primitive_normal(ctx: &FieldContext) -> Self {
        let g = PolyRing::new(ctx.base()).x_pow_minus_one(ctx.n());
        let e = ctx.order_factorization().clone();
        Self { e1: e.clone(), e2: e, g1: g.clone(), g2: g }
    }

    /// No freeness requirement at all.
    #[must_use]
    pub fn vacuous(ctx: &FieldContext) -> Self {
        let one = PolyRing::new(ctx.base()).one();
        Self { e1: Factorization::one(), e2: Factorization::one(), g1: one.clone(), g2: one }
    }
}

/// Per-element data for one rational function.
struct Census {
    /// `eps` passes the conditions placed on it.
    first: Vec<bool>,
    /// `eps` passes the conditions placed on `f(eps)`.
    second: Vec<bool>,
    /// `f(eps)` for `eps` outside the zeros, poles and `0`.
    image: Vec<Option<u32>>,
    /// Base index of `N(eps)`.
    norm: Vec<u32>,
    /// Base index of `Tr(eps^-1)`.
    trace_inv: Vec<u32>,
}

impl Census {
    fn build<T: Float + FftNum>(
        table: &CharacterTable<T>,
        f: &RationalFunction,
        e1: &Factorization,
        g1: &PolyOverFq,
        e2: &Factorization,
        g2: &PolyOverFq,
    ) -> Result<Self> {
        let ctx = table.context();
        let ext = ctx.ext();
        let base = ctx.base();
        table.support_mask(g1)?;
        table.support_mask(g2)?;
        let rows = (1..table.size())
            .into_par_iter()
            .map(|i| {
                let eps = table.element(i);
                let first = ctx.is_e_free(&eps, e1)? && ctx.is_g_free(&eps, g1);
                let second = ctx.is_e_free(&eps, e2)? && ctx.is_g_free(&eps, g2);
                let image = match f.evaluate(ext, &eps) {
                    RationalValue::Value(v) if !ext.is_zero(&v) => Some(table.index(&v) as u32),
                    _ => None,
                };
                let norm = base.to_index_u64(&ctx.norm(&eps)) as u32;
                let inv = ext.inv(&eps).expect("nonzero");
                let trace_inv = base.to_index_u64(&ctx.trace(&inv)) as u32;
                Ok((first, second, image, norm, trace_inv))
            })
            .collect::<Result<Vec<_>>>()?;
        let n = table.size() as usize;
        let mut c = Census {
            first: vec![false; n],
            second: vec![false; n],
            image: vec![None; n],
            norm: vec![0; n],
            trace_inv: vec![0; n],
        };
        for (i, (a, b, im, nm, tr)) in rows.into_iter().enumerate() {
            c.first[i + 1] = a;
            c.second[i + 1] = b;
            c.image[i + 1] = im;
            c.norm[i + 1] = nm;
            c.trace_inv[i + 1] = tr;
        }
        Ok(c)
    }

    fn accepted(&self, i: usize) -> bool {
        self.first[i] && self.image[i].is_some_and(|v| self.second[v as usize])
    }

    fn count(&self, trace_inv: u32, norm: u32) -> u64 {
        (1..self.first.len())
            .filter(|&i| self.norm[i] == norm && self.trace_inv[i] == trace_inv && self.accepted(i))
            .count() as u64
    }
}

fn qe1<T: Float + FftNum>(table: &CharacterTable<T>, e1: &Factorization) -> Result<Factorization> {
    coprime_part_q(e1, table.q())
}

/// Rejects `b` unless it is `gcd(e1, q - 1)`-free.
fn check_norm_class<T: Float + FftNum>(table: &CharacterTable<T>, e1: &Factorization, b: &FieldElement) -> Result<u64> {
    let j = table.base_log_of(b)?;
    let delta = e1.value().gcd(&BigUint::from(table.q() - 1));
    if j.gcd(&delta.to_u64().expect("divides q - 1")) != 1 {
        return Err(Error::InvalidArgument(format!("norm class {b:?} is not {delta}-free")));
    }
    Ok(j)
}

fn target_trace(base: &crate::ffield::GaloisField, a: &FieldElement, b: &FieldElement) -> Result<u32> {
    let binv = base.inv(b).ok_or(Error::ZeroElement("inverse"))?;
    Ok(base.to_index_u64(&base.mul(a, &binv)) as u32)
}

/// Number of `eps` with `eps` and `f(eps)` primitive normal, `Tr(eps^-1) = a b^-1` and `N(eps) = b`.
pub fn count_direct<T: Float + FftNum>(
    table: &CharacterTable<T>,
    f: &RationalFunction,
    a: &FieldElement,
    b: &FieldElement,
) -> Result<u64> {
    count_direct_with(table, f, a, b, &FreenessConditions::primitive_normal(table.context()))
}

/// As [`count_direct`] under general freeness conditions.
pub fn count_direct_with<T: Float + FftNum>(
    table: &CharacterTable<T>,
    f: &RationalFunction,
    a: &FieldElement,
    b: &FieldElement,
    cond: &FreenessConditions,
) -> Result<u64> {
    check_norm_class(table, &cond.e1, b)?;
    let census = Census::build(table, f, &qe1(table, &cond.e1)?, &cond.g1, &cond.e2, &cond.g2)?;
    let base = table.context().base();
    Ok(census.count(target_trace(base, a, b)?, base.to_index_u64(b) as u32))
}

/// [`count_direct_with`] for every `a` and every admissible `b`, keyed by base indices.
pub fn count_direct_all<T: Float + FftNum>(
    table: &CharacterTable<T>,
    f: &RationalFunction,
    cond: &FreenessConditions,
) -> Result<Vec<((u64, u64), u64)>> {
    let census = Census::build(table, f, &qe1(table, &cond.e1)?, &cond.g1, &cond.e2, &cond.g2)?;
    let base = table.context().base();
    let mut out = Vec::new();
    for bi in 1..table.q() {
        let b = base.from_index_u64(bi);
        if check_norm_class(table, &cond.e1, &b).is_err() {
            continue;
        }
        for ai in 0..table.q() {
            let t = target_trace(base, &base.from_index_u64(ai), &b)?;
            out.push(((ai, bi), census.count(t, bi as u32)));
        }
    }
    Ok(out)
}

/// Number of `eps` with `eps` and `f(eps)` primitive normal.
pub fn count_pairs<T: Float + FftNum>(table: &CharacterTable<T>, f: &RationalFunction) -> Result<u64> {
    let c = FreenessConditions::primitive_normal(table.context());
    let census = Census::build(table, f, &c.e1, &c.g1, &c.e2, &c.g2)?;
    Ok((1..table.size() as usize).filter(|&i| census.accepted(i)).count() as u64)
}

/// Number of `eps` with `eps` and `f(eps)` primitive normal and prenorm `a`.
///
/// The count is also assembled from [`count_direct`] over all primitive `b`; a
/// disagreement is reported as [`Error::CrossCheckFailed`].
pub fn count_prenorm<T: Float + FftNum>(table: &CharacterTable<T>, f: &RationalFunction, a: &FieldElement) -> Result<u64> {
    let ctx = table.context();
    if ctx.n() < 2 {
        return Err(Error::InvalidArgument("prenorm requires n >= 2".into()));
    }
    let c = FreenessConditions::primitive_normal(ctx);
    let full = Census::build(table, f, &c.e1, &c.g1, &c.e2, &c.g2)?;
    let base = ctx.base();
    let direct = (1..table.size())
        .into_par_iter()
        .map(|i| -> Result<u64> {
            if !full.accepted(i as usize) {
                return Ok(0);
            }
            Ok(u64::from(ctx.prenorm(&table.element(i))? == *a))
        })
        .sum::<Result<u64>>()?;

    let reduced = Census::build(table, f, &qe1(table, &c.e1)?, &c.g1, &c.e2, &c.g2)?;
    let mut assembled = 0;
    for bi in 1..table.q() {
        let b = base.from_index_u64(bi);
        if check_norm_class(table, &c.e1, &b).is_ok() {
            assembled += reduced.count(target_trace(base, a, &b)?, bi as u32);
        }
    }
    if assembled != direct {
        return Err(Error::CrossCheckFailed(format!(
            "prenorm count {direct} differs from the sum over norm classes {assembled}"
        )));
    }
    Ok(direct)
}

/// The counting expression evaluated as a character sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacterCount {
    pub value: f64,
    pub rounded: i64,
    pub residue: f64,
}

/// Largest field accepted by [`count_via_characters`].
pub const CHARACTER_COUNT_LIMIT: u64 = 5000;

/// The count of [`count_direct_with`] expanded into multiplicative and additive
/// characters: outer sums over squarefree `d1 | Q_{e1}`, `d2 | e2`, `h1 | g1`,
/// `h2 | g2`, inner sums over the characters of those orders, the trace and norm
/// characters, and the admissible `eps`.
pub fn count_via_characters<T: Float + FftNum>(
    table: &CharacterTable<T>,
    f: &RationalFunction,
    a: &FieldElement,
    b: &FieldElement,
    cond: &FreenessConditions,
) -> Result<CharacterCount> {
    if table.size() > CHARACTER_COUNT_LIMIT {
        return Err(Error::RangeExceeded(format!("q^n = {} exceeds {CHARACTER_COUNT_LIMIT}", table.size())));
    }
    let ctx = table.context();
    let base = ctx.base();
    let ext = ctx.ext();
    let q = table.q();
    let order = table.order();
    let jb = check_norm_class(table, &cond.e1, b)?;
    let qe = qe1(table, &cond.e1)?;
    let primes1 = table.divisor_primes(&qe)?;
    let primes2 = table.divisor_primes(&cond.e2)?;
    let mask1 = table.support_mask(&cond.g1)?;
    let mask2 = table.support_mask(&cond.g2)?;

    let h = theta::<f64>(&qe)? * theta::<f64>(&cond.e2)? * table.mask_weight(mask1).0 * table.mask_weight(mask2).0
        / (q * (q - 1)) as f64;

    // Domain: eps != 0 with f(eps) != 0, infinity.
    let domain: Vec<(u64, u64)> = (1..table.size())
        .filter_map(|i| match f.evaluate(ext, &table.element(i)) {
            RationalValue::Value(v) if !ext.is_zero(&v) => Some((i, table.index(&v))),
            _ => None,
        })
        .collect();

    let step = order / (q - 1);
    let c = base.neg(&base.mul(a, &base.inv(b).ok_or(Error::ZeroElement("inverse"))?));
    let trace_weights: Vec<Complex<T>> =
        (0..q).map(|t| table.lambda0(base.to_index_u64(&base.mul(&c, &base.from_index_u64(t))))).collect();
    let big_a: Vec<Complex<T>> = domain
        .iter()
        .map(|&(e, _)| {
            let k = table.log[e as usize] as u64;
            let mut norm_part: Complex<T> = Complex::zero();
            for i in 1..q {
                let s = step * i % order;
                norm_part = norm_part + table.root(s * k) * table.root(order - s * jb % order);
            }
            let inv = table.inv_index(e);
            let mut trace_part: Complex<T> = Complex::zero();
            for (t, w) in trace_weights.iter().enumerate() {
                trace_part = trace_part + *w * table.psi(table.mul_index(u64::from(table.base_to_ext[t]), inv));
            }
            norm_part * trace_part
        })
        .collect();

    let mult_sums = |primes: &[u64], pick: &dyn Fn(&(u64, u64)) -> u64| -> Vec<(f64, Vec<Complex<T>>)> {
        (0u32..1 << primes.len())
            .map(|m| {
                let (d, phi) = squarefree_from_mask(primes, m);
                let mu = if m.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                let vals = domain.iter().map(|x| table.order_sum(d, table.log[pick(x) as usize] as u64)).collect();
                (mu / phi as f64, vals)
            })
            .collect()
    };
    let orders = table.additive_orders()?;
    let add_sums = |mask: u64, pick: &dyn Fn(&(u64, u64)) -> u64| -> Vec<(f64, Vec<Complex<T>>)> {
        submasks(mask)
            .into_iter()
            .map(|hm| {
                let ys: Vec<u64> = (0..table.size()).filter(|&y| orders[y as usize] == Some(hm)).collect();
                let vals = domain
                    .iter()
                    .map(|x| {
                        let v = pick(x);
                        ys.iter().fold(Complex::zero(), |acc, &y| acc + table.psi(table.mul_index(y, v)))
                    })
                    .collect();
                (table.mask_weight(hm).1, vals)
            })
            .collect()
    };
    let at_eps = |x: &(u64, u64)| x.0;
    let at_image = |x: &(u64, u64)| x.1;
    let b1 = mult_sums(&primes1, &at_eps);
    let b2 = mult_sums(&primes2, &at_image);
    let l1 = add_sums(mask1, &at_eps);
    let l2 = add_sums(mask2, &at_image);

    let mut terms = Vec::with_capacity(b1.len() * b2.len() * l1.len() * l2.len());
    for (w1, v1) in &b1 {
        for (w2, v2) in &b2 {
            for (w3, v3) in &l1 {
                for (w4, v4) in &l2 {
                    let inner: Vec<Complex<T>> =
                        (0..domain.len()).map(|i| big_a[i] * v1[i] * v2[i] * v3[i] * v4[i]).collect();
                    terms.push(tree_sum(&inner) * table.cst(w1 * w2 * w3 * w4));
                }
            }
        }
    }
    let total = tree_sum(&terms) * table.cst(h);
    let (rounded, residue) = round_sum(total, "counting expression")?;
    Ok(CharacterCount { value: total.re.to_f64().unwrap_or(f64::NAN), rounded, residue })
}

fn submasks(mask: u64) -> Vec<u64> {
    let mut out = vec![0];
    let mut s = mask;
    while s != 0 {
        out.push(s);
        s = (s - 1) & mask;
    }
    out.sort_unstable();
    out
}

/// One exported oracle comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRecord {
    pub q: u64,
    pub n: u64,
    pub f: String,
    /// Base-field index of `a`.
    pub a: u64,
    /// Base-field index of `b`.
    pub b: u64,
    pub count_direct: u64,
    #[serde(rename = "count_E5")]
    pub count_sums: Option<f64>,
    pub residue: Option<f64>,
}
