use num_bigint::BigUint;
use num_complex::Complex;
use num_traits::{Float, One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::{FftNum, FftPlanner};
use serde::Serialize;

use super::CharacterTable;
use crate::error::{Error, Result};
use crate::ffield::{parse_fraction, Field, FieldContext, FieldElement, GaloisField, Poly, PolyRing};

type ExtPoly = Poly<FieldElement>;

/// `c * prod f_i^(a_i)` over `F_{q^n}` with distinct monic irreducible `f_i` and nonzero `a_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeilFunction {
    pub constant: FieldElement,
    pub factors: Vec<(ExtPoly, i64)>,
}

impl WeilFunction {
    pub fn new(ext: &GaloisField, constant: FieldElement, factors: Vec<(ExtPoly, i64)>) -> Result<Self> {
        let ring = PolyRing::new(ext);
        if ext.is_zero(&constant) {
            return Err(Error::InvalidArgument("zero constant".into()));
        }
        for (i, (f, a)) in factors.iter().enumerate() {
            if *a == 0 || ring.lead(f).map_or(true, |l| !ext.is_one(&l)) || !ring.is_irreducible(f) {
                return Err(Error::InvalidArgument("factors must be monic irreducible with nonzero exponent".into()));
            }
            if factors[..i].iter().any(|(g, _)| g == f) {
                return Err(Error::InvalidArgument("repeated factor".into()));
            }
        }
        Ok(Self { constant, factors })
    }

    /// Parses and factors an expression such as `x^2+1` or `(x+t)/(x+1)^2`.
    pub fn parse(ctx: &FieldContext, text: &str) -> Result<Self> {
        let ext = ctx.ext();
        let ring = PolyRing::new(ext);
        let (num, den) = parse_fraction(text, ext, Some(ext.gen()))?;
        let (Some(ln), Some(ld)) = (ring.lead(&num), ring.lead(&den)) else {
            return Err(Error::InvalidArgument(format!("{text:?} is zero or undefined")));
        };
        let constant = ext.mul(&ln, &ext.inv(&ld).expect("nonzero lead"));
        let mut factors: Vec<(ExtPoly, i64)> = Vec::new();
        for (poly, sign) in [(num, 1i64), (den, -1i64)] {
            for (g, e) in irreducible_factors(ext, &poly, ctx.seed()) {
                match factors.iter_mut().find(|(h, _)| *h == g) {
                    Some(slot) => slot.1 += sign * i64::from(e),
                    None => factors.push((g, sign * i64::from(e))),
                }
            }
        }
        factors.retain(|(_, a)| *a != 0);
        Self::new(ext, constant, factors)
    }

    /// `sum deg f_i`.
    #[must_use]
    pub fn degree_sum(&self) -> u64 {
        self.factors.iter().map(|(f, _)| f.coeffs.len() as u64 - 1).sum()
    }

    /// `None` at zeros and poles.
    #[must_use]
    pub fn evaluate(&self, ext: &GaloisField, eps: &FieldElement) -> Option<FieldElement> {
        let ring = PolyRing::new(ext);
        let mut acc = self.constant.clone();
        for (f, a) in &self.factors {
            let v = ring.eval(f, eps);
            let v = if *a < 0 { ext.inv(&v)? } else if ext.is_zero(&v) { return None } else { v };
            acc = ext.mul(&acc, &ext.pow_u64(&v, a.unsigned_abs()));
        }
        Some(acc)
    }
}

/// `num / den` over `F_{q^n}` in lowest terms with monic `den`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditiveArgument {
    pub num: ExtPoly,
    pub den: ExtPoly,
}

impl AdditiveArgument {
    pub fn new(ext: &GaloisField, num: ExtPoly, den: ExtPoly) -> Result<Self> {
        let ring = PolyRing::new(ext);
        if ring.is_zero(&den) {
            return Err(Error::ZeroElement("denominator"));
        }
        let g = ring.gcd(&num, &den);
        let num = ring.exact_div(&num, &g).expect("gcd divides");
        let den = ring.exact_div(&den, &g).expect("gcd divides");
        let linv = ext.inv(&ring.lead(&den).expect("nonzero")).expect("nonzero lead");
        Ok(Self { num: ring.trim(ring.scale(&num, &linv)), den: ring.scale(&den, &linv) })
    }

    pub fn parse(ctx: &FieldContext, text: &str) -> Result<Self> {
        let ext = ctx.ext();
        let (num, den) = parse_fraction(text, ext, Some(ext.gen()))?;
        Self::new(ext, num, den)
    }

    /// `deg num - deg den`; `None` for the zero function.
    #[must_use]
    pub fn degree(&self) -> Option<i64> {
        let n = self.num.coeffs.iter().rposition(|c| c.coeffs.iter().any(|&x| x != 0))?;
        Some(n as i64 - (self.den.coeffs.len() as i64 - 1))
    }

    #[must_use]
    pub fn evaluate(&self, ext: &GaloisField, eps: &FieldElement) -> Option<FieldElement> {
        let ring = PolyRing::new(ext);
        let d = ext.inv(&ring.eval(&self.den, eps))?;
        Some(ext.mul(&ring.eval(&self.num, eps), &d))
    }
}

/// Outcome of one bound check, maximised over the characters of the requested order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeilRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
    /// Number of characters checked.
    pub characters: u64,
    /// The integer multiplying `q^(n/2)` in the bound.
    pub multiplier: i64,
    /// The bound is zero.
    pub edge_case: bool,
}

const SLACK: f64 = 1e-6;

/// `|sum chi(f(eps))|` over `eps` with `f(eps) != 0, infinity`, for every `chi` of order `d`,
/// against `(sum deg f_i - 1) q^(n/2)`.
pub fn weil_check_multiplicative<T: Float + FftNum>(
    table: &CharacterTable<T>,
    f: &WeilFunction,
    d: u64,
) -> Result<WeilRecord> {
    check_order(table, d)?;
    power_precheck(f, d)?;
    let spectrum = multiplicative_spectrum(table, f);
    Ok(finish(table, &spectrum, d, f.degree_sum() as i64 - 1))
}

/// [`weil_check_multiplicative`] for every order `d | q^n - 1` the precheck admits.
pub fn weil_scan_multiplicative<T: Float + FftNum>(table: &CharacterTable<T>, f: &WeilFunction) -> Vec<(u64, WeilRecord)> {
    let spectrum = multiplicative_spectrum(table, f);
    crate::intarith::divisors_u64(table.order())
        .into_iter()
        .filter(|&d| power_precheck(f, d).is_ok())
        .map(|d| (d, finish(table, &spectrum, d, f.degree_sum() as i64 - 1)))
        .collect()
}

fn power_precheck(f: &WeilFunction, d: u64) -> Result<()> {
    if f.factors.iter().all(|(_, a)| a % d as i64 == 0) {
        return Err(Error::PrecheckFailed(format!("f is a constant times a {d}-th power")));
    }
    Ok(())
}

/// Sums of every multiplicative character over the values of `f`.
fn multiplicative_spectrum<T: Float + FftNum>(table: &CharacterTable<T>, f: &WeilFunction) -> Vec<Complex<T>> {
    let ext = table.context().ext();
    let mut hist = vec![Complex::<T>::zero(); table.order() as usize];
    for i in 0..table.size() {
        if let Some(v) = f.evaluate(ext, &table.element(i)) {
            let k = table.log[table.index(&v) as usize] as usize;
            hist[k] = hist[k] + Complex::one();
        }
    }
    transform(hist)
}

/// `|sum chi(f(eps)) lambda_y(g(eps))|` over `eps` with `f(eps) != 0, infinity` and
/// `g(eps) != infinity`, for every `chi` of order `d`, against `(D1 + D2 + D3 + D4 - 1) q^(n/2)`.
pub fn weil_check_mixed<T: Float + FftNum>(
    table: &CharacterTable<T>,
    f: &WeilFunction,
    g: &AdditiveArgument,
    d: u64,
    y: &FieldElement,
) -> Result<WeilRecord> {
    check_order(table, d)?;
    let (spectrum, multiplier) = mixed_spectrum(table, f, g, y)?;
    Ok(finish(table, &spectrum, d, multiplier))
}

/// [`weil_check_mixed`] for every order `d | q^n - 1`, the trivial character included.
pub fn weil_scan_mixed<T: Float + FftNum>(
    table: &CharacterTable<T>,
    f: &WeilFunction,
    g: &AdditiveArgument,
    y: &FieldElement,
) -> Result<Vec<(u64, WeilRecord)>> {
    let (spectrum, multiplier) = mixed_spectrum(table, f, g, y)?;
    Ok(crate::intarith::divisors_u64(table.order())
        .into_iter()
        .map(|d| (d, finish(table, &spectrum, d, multiplier)))
        .collect())
}

fn mixed_spectrum<T: Float + FftNum>(
    table: &CharacterTable<T>,
    f: &WeilFunction,
    g: &AdditiveArgument,
    y: &FieldElement,
) -> Result<(Vec<Complex<T>>, i64)> {
    let ctx = table.context();
    let ext = ctx.ext();
    let yi = table.index(y);
    if yi == 0 {
        return Err(Error::PrecheckFailed("additive character is trivial".into()));
    }
    let deg = g.degree().ok_or_else(|| Error::PrecheckFailed("g is zero".into()))?;
    let den_deg = g.den.coeffs.len() as u64 - 1;
    if deg == 0 && den_deg == 0 {
        return Err(Error::PrecheckFailed("g is constant".into()));
    }
    let num_deg = (deg + den_deg as i64) as u64;
    if num_deg >= table.size() || den_deg >= table.size() {
        return Err(Error::PrecheckFailed("g has degree at least q^n".into()));
    }

    let mut hist = vec![Complex::<T>::zero(); table.order() as usize];
    for i in 0..table.size() {
        let eps = table.element(i);
        let (Some(fv), Some(gv)) = (f.evaluate(ext, &eps), g.evaluate(ext, &eps)) else { continue };
        let k = table.log[table.index(&fv) as usize] as usize;
        hist[k] = hist[k] + table.psi(table.mul_index(yi, table.index(&gv)));
    }
    let d1 = f.degree_sum() as i64;
    let d2 = deg.max(0);
    let d3 = den_deg as i64;
    let d4: u64 = irreducible_factors(ext, &g.den, ctx.seed())
        .into_iter()
        .filter(|(h, _)| !f.factors.iter().any(|(fi, _)| fi == h))
        .map(|(h, _)| h.coeffs.len() as u64 - 1)
        .sum();
    Ok((transform(hist), d1 + d2 + d3 + d4 as i64 - 1))
}

fn check_order<T: Float + FftNum>(table: &CharacterTable<T>, d: u64) -> Result<()> {
    if d == 0 || table.order() % d != 0 {
        return Err(Error::InvalidArgument(format!("{d} does not divide q^n - 1")));
    }
    Ok(())
}

/// Entry `c` becomes `sum_k hist[k] e^(2 pi i c k / (q^n - 1))`, the sum of the character `chi_c`.
fn transform<T: FftNum>(mut hist: Vec<Complex<T>>) -> Vec<Complex<T>> {
    let len = hist.len();
    FftPlanner::new().plan_fft_inverse(len).process(&mut hist);
    hist
}

/// Largest character sum among the characters of order `d`.
fn finish<T: Float + FftNum>(table: &CharacterTable<T>, spectrum: &[Complex<T>], d: u64, multiplier: i64) -> WeilRecord {
    let hist = spectrum;
    let step = table.order() / d;
    let mut lhs = 0.0f64;
    let mut characters = 0;
    for t in 1..=d {
        if num_integer::gcd(t, d) == 1 {
            let c = (step * t % table.order()) as usize;
            lhs = lhs.max(hist[c].norm().to_f64().unwrap_or(f64::INFINITY));
            characters += 1;
        }
    }
    let rhs = multiplier as f64 * (table.size() as f64).sqrt();
    WeilRecord { lhs, rhs, ok: lhs <= rhs + SLACK, characters, multiplier, edge_case: multiplier <= 0 }
}

/// Monic irreducible factors with multiplicities: distinct-degree splitting, then equal-degree splitting.
pub(crate) fn irreducible_factors(ext: &GaloisField, f: &ExtPoly, seed: u64) -> Vec<(ExtPoly, u32)> {
    let ring = PolyRing::new(ext);
    let f = ring.trim(f.clone());
    if ring.degree(&f).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let size: BigUint = ext.order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = ring.x();
    let mut rest = ring.monic(&f);
    let mut out = Vec::new();
    let mut xpow = x.clone();
    let mut k = 0;
    while ring.degree(&rest).unwrap_or(0) > 0 {
        k += 1;
        xpow = ring.powmod(&xpow, &size, &rest);
        let part = ring.gcd(&ring.sub(&xpow, &ring.rem(&x, &rest)), &rest);
        if ring.degree(&part).unwrap_or(0) == 0 {
            continue;
        }
        for h in ring.equal_degree_factors(&part, k, &mut rng) {
            let mut e = 0;
            while let Some(qt) = ring.exact_div(&rest, &h) {
                rest = qt;
                e += 1;
            }
            out.push((h, e));
        }
        xpow = ring.rem(&xpow, &rest);
    }
    out.sort_by(|a, b| (a.0.coeffs.len(), &a.0.coeffs).cmp(&(b.0.coeffs.len(), &b.0.coeffs)));
    out
}
