//! Sufficient conditions for membership in `S_m` and the prime sieve.
//!
//! A pair `(q, n)` is certified when
//! `q^{n/2-2} > (2m+2) W(e') W(e) W(g)^2 M` for some sieve parameters with
//! `S > 0`. The unsieved case `e' = Q`, `e = q^n - 1`, `g = x^n - 1` has
//! `S = M = 1`.
//!
//! Factorizations may be incomplete. The unresolved cofactor contributes an
//! unknown number of primes above [`TRIAL_LIMIT`](crate::intarith::TRIAL_LIMIT),
//! and verdicts are evaluated at both ends of that range.

mod params;
mod scan;
mod search;
mod tables;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intarith::{coprime_part_partial, omega_bounds, Factorization, Factorizer, TRIAL_LIMIT};
use crate::polyfactor::{characteristic_of, factor_xn_minus_1, classify_pi, PiCase, XnFactorization};
use crate::scalar::{rational_string, Scalar};
use crate::Rational;

pub use params::{Divisor, FactorSelection, SieveParams};
pub use scan::{scan, verdicts_csv, ScanOptions, ScanOutcome};
pub use search::{search_params, SearchBudget};
pub use tables::{
    check_published_row, published_params, part2_worstcase, table1_nk_check, table1_rows, table2_rows, table3_rows,
    table6_rows, Part2Bounds, PublishedRow, RowCheck, RowStatus, Table1Row, Table2Row, PART2_TEXT_ROW,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

impl Verdict {
    #[must_use]
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Unknown => "unknown",
        }
    }
}

/// Which criterion produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[serde(rename = "thm31")]
    Unsieved,
    Sieve,
    #[serde(rename = "paper-params")]
    Published,
}

impl Method {
    #[must_use]
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Unsieved => "thm31",
            Method::Sieve => "sieve",
            Method::Published => "paper-params",
        }
    }
}

/// Factorization data for one pair `(q, n)`.
#[derive(Debug, Clone)]
pub struct PairData {
    pub q: u64,
    pub n: u64,
    /// `q^n - 1`.
    pub order: Factorization,
    /// `Q`, the part of `q^n - 1` coprime to `q - 1`.
    pub q_part: Factorization,
    pub xn: XnFactorization,
    /// Range of the number of distinct primes hiding in the unresolved cofactor.
    pub unknown: (u32, u32),
    /// Whether the cofactor is coprime to `q - 1`, so that its primes all divide `Q`.
    pub unknown_in_q: bool,
}

impl PairData {
    pub fn new(q: u64, n: u64, factorizer: &Factorizer) -> Result<Self> {
        characteristic_of(q)?;
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let order = factorizer.factorize_power_minus_one(q, n)?;
        Self::from_order(q, n, order)
    }

    /// Builds the pair data from a given factorization of `q^n - 1`.
    pub fn from_order(q: u64, n: u64, order: Factorization) -> Result<Self> {
        let xn = factor_xn_minus_1(q, n)?;
        let q_part = coprime_part_partial(&order, q);
        let known = order.factors().len() as u32;
        let (lo, hi) = omega_bounds(&order);
        let unknown = (lo - known, hi - known);
        let unknown_in_q = order.cofactor().gcd(&BigUint::from(q - 1)).is_one();
        Ok(Self { q, n, order, q_part, xn, unknown, unknown_in_q })
    }

    #[must_use]
    pub fn is_complete(&self) -> bool {
        self.order.is_complete()
    }

    /// `log2(q^{n/2 - 2})`.
    #[must_use]
    pub fn lhs_log2(&self) -> f64 {
        (self.n as f64 / 2.0 - 2.0) * (self.q as f64).log2()
    }
}

/// Complementary sums of the sieve over the known primes.
///
/// `S = 1 - excluded_q - excluded_order - 2 excluded_poly`.
#[derive(Debug, Clone, PartialEq)]
pub struct SieveSums<T> {
    /// Primes of `Q` not dividing `e'`.
    pub u: u32,
    /// Primes of `q^n - 1` not dividing `e`.
    pub r: u32,
    /// Irreducible factors of `x^n - 1` not dividing `g`.
    pub s: u64,
    pub excluded_q: T,
    pub excluded_order: T,
    pub excluded_poly: T,
}

impl<T: Scalar> SieveSums<T> {
    pub fn new(data: &PairData, params: &SieveParams) -> Result<Self> {
        Ok(Resolved::new(data, params)?.sums())
    }

    /// The sieve constant `S`.
    #[must_use]
    pub fn delta(&self) -> T {
        T::one() - self.excluded_q.clone() - self.excluded_order.clone() - T::from_int(2) * self.excluded_poly.clone()
    }

    /// `M = (u + r + 2s - 1) / S + 2`, infinite when `S <= 0`.
    #[must_use]
    pub fn m_value(&self) -> f64 {
        m_from(self.u as u64 + self.r as u64 + 2 * self.s, self.delta().as_f64())
    }
}

fn m_from(count: u64, s: f64) -> f64 {
    if s <= 0.0 {
        return f64::INFINITY;
    }
    (count as f64 - 1.0) / s + 2.0
}

/// Parameters resolved against the known primes of a pair.
struct Resolved {
    excluded_q: Vec<BigUint>,
    excluded_order: Vec<BigUint>,
    excluded_poly: Vec<(u64, u64)>,
    omega_eprime: u32,
    omega_e: u32,
    omega_g: u64,
    unknown_in_eprime: bool,
    unknown_in_e: bool,
    q: u64,
}

impl Resolved {
    fn new(data: &PairData, params: &SieveParams) -> Result<Self> {
        let (eq, iq, unknown_in_eprime) = split_primes(&data.q_part, &params.e_prime, "e'")?;
        let (eo, io, unknown_in_e) = split_primes(&data.order, &params.e, "e")?;
        let included = params.g.resolve(&data.xn)?;
        let mut excluded_poly = Vec::new();
        let mut omega_g = 0;
        for (deg, total) in data.xn.distinct_factors() {
            let inc = included.get(&deg).copied().unwrap_or(0);
            omega_g += inc;
            if total > inc {
                excluded_poly.push((deg, total - inc));
            }
        }
        Ok(Self {
            excluded_q: eq,
            excluded_order: eo,
            excluded_poly,
            omega_eprime: iq,
            omega_e: io,
            omega_g,
            unknown_in_eprime,
            unknown_in_e,
            q: data.q,
        })
    }

    fn sums<T: Scalar>(&self) -> SieveSums<T> {
        let recip_sum = |ps: &[BigUint]| ps.iter().fold(T::zero(), |acc, p| acc + T::recip_of(p));
        let qb = BigInt::from(self.q);
        let poly = self.excluded_poly.iter().fold(T::zero(), |acc, &(deg, count)| {
            acc + T::from_ratio(&BigInt::from(count), &Pow::pow(&qb, deg as u32))
        });
        SieveSums {
            u: self.excluded_q.len() as u32,
            r: self.excluded_order.len() as u32,
            s: self.excluded_poly.iter().map(|&(_, c)| c).sum(),
            excluded_q: recip_sum(&self.excluded_q),
            excluded_order: recip_sum(&self.excluded_order),
            excluded_poly: poly,
        }
    }
}

/// Known primes of `f` not dividing `d`, the number that do, and whether `d` takes the cofactor.
fn split_primes(f: &Factorization, d: &Divisor, name: &str) -> Result<(Vec<BigUint>, u32, bool)> {
    match d {
        Divisor::Full => Ok((Vec::new(), f.factors().len() as u32, !f.is_complete())),
        Divisor::Value(v) => {
            if v.is_zero() || !(f.value() % v).is_zero() {
                return Err(Error::InvalidArgument(format!("{name} = {v} does not divide {}", f.value())));
            }
            if !f.is_complete() && !v.gcd(f.cofactor()).is_one() {
                return Err(Error::IncompleteFactorization(format!(
                    "{name} = {v} shares a factor with the unresolved cofactor"
                )));
            }
            let (inc, exc): (Vec<_>, Vec<_>) = f.factors().iter().map(|(p, _)| p.clone()).partition(|p| (v % p).is_zero());
            Ok((exc, inc.len() as u32, false))
        }
    }
}

/// Outcome of evaluating one of the criteria for a pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SieveReport {
    pub q: u64,
    pub n: u64,
    pub m: u64,
    pub method: Method,
    pub params: SieveParams,
    /// Exact `S`; the pessimistic value when the factorization is incomplete.
    pub s_exact: Rational,
    pub s_float: f64,
    pub m_value: f64,
    pub u: u32,
    pub r: u32,
    pub s: u64,
    pub lhs_log2: f64,
    pub rhs_log2: f64,
    pub verdict: Verdict,
    pub complete: bool,
}

impl Serialize for SieveReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SieveReport", 11)?;
        st.serialize_field("q", &self.q)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("method", &self.method)?;
        st.serialize_field("params", &self.params)?;
        st.serialize_field("S", &rational_string(&self.s_exact))?;
        st.serialize_field("S_float", &self.s_float)?;
        st.serialize_field("M", &self.m_value)?;
        st.serialize_field("lhs_log2", &self.lhs_log2)?;
        st.serialize_field("rhs_log2", &self.rhs_log2)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.end()
    }
}

/// `q^{n-4} > (2m+2)^2 4^w`, i.e. `q^{n/2-2} > (2m+2) 2^w`, exactly.
fn exceeds_exact(q: u64, n: u64, m: u64, w: u64) -> bool {
    if n < 4 {
        return false;
    }
    let lhs = Pow::pow(&BigUint::from(q), (n - 4) as u32);
    let c = BigUint::from(2 * m + 2);
    lhs > (&c * &c) << (2 * w)
}

fn check_m(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    Ok(())
}

/// The unsieved criterion `q^{n/2-2} > (2m+2) W(Q) W(q^n-1) W(x^n-1)^2`.
pub fn unsieved_check(data: &PairData, m: u64) -> Result<SieveReport> {
    check_m(m)?;
    let known = data.q_part.factors().len() as u64 + data.order.factors().len() as u64 + 2 * data.xn.distinct_count();
    let at = |k: u32| {
        let kq = if data.unknown_in_q { k } else { 0 };
        known + u64::from(k) + u64::from(kq)
    };
    let c = ((2 * m + 2) as f64).log2();
    let (lo, hi) = data.unknown;
    let w_hi = at(hi);
    let verdict = if exceeds_exact(data.q, data.n, m, w_hi) {
        Verdict::Holds
    } else if !exceeds_exact(data.q, data.n, m, at(lo)) {
        Verdict::Fails
    } else {
        Verdict::Unknown
    };
    Ok(SieveReport {
        q: data.q,
        n: data.n,
        m,
        method: Method::Unsieved,
        params: SieveParams::trivial(),
        s_exact: Rational::one(),
        s_float: 1.0,
        m_value: 1.0,
        u: 0,
        r: 0,
        s: 0,
        lhs_log2: data.lhs_log2(),
        rhs_log2: c + w_hi as f64,
        verdict,
        complete: data.is_complete(),
    })
}

struct Endpoint {
    s: Rational,
    m: f64,
    rhs_log2: f64,
    w: u64,
    u: u32,
    r: u32,
}

fn endpoint(res: &Resolved, sums: &SieveSums<Rational>, data: &PairData, m: u64, k: u32, pessimistic: bool) -> Endpoint {
    let kq = if data.unknown_in_q || pessimistic { k } else { 0 };
    let (mut u, mut r) = (sums.u, sums.r);
    let (mut we, mut wo) = (res.omega_eprime, res.omega_e);
    if res.unknown_in_eprime { we += kq } else { u += kq }
    if res.unknown_in_e { wo += k } else { r += k }
    let mut s = sums.delta();
    if pessimistic {
        let added = (u - sums.u) + (r - sums.r);
        s -= Rational::new(BigInt::from(added), BigInt::from(TRIAL_LIMIT));
    }
    let mv = if s.is_positive() { m_from(u64::from(u) + u64::from(r) + 2 * sums.s, s.as_f64()) } else { f64::INFINITY };
    let w = u64::from(we) + u64::from(wo) + 2 * res.omega_g;
    let rhs_log2 = ((2 * m + 2) as f64).log2() + w as f64 + mv.log2();
    Endpoint { s, m: mv, rhs_log2, w, u, r }
}

fn endpoint_holds(e: &Endpoint, data: &PairData, m: u64) -> bool {
    if !e.s.is_positive() {
        return false;
    }
    let lhs = data.lhs_log2();
    if e.m == 1.0 && (lhs - e.rhs_log2).abs() < 1e-6 {
        return exceeds_exact(data.q, data.n, m, e.w);
    }
    lhs > e.rhs_log2
}

/// The sieve criterion `S > 0` and `q^{n/2-2} > (2m+2) W(e') W(e) W(g)^2 M`.
pub fn sieve_check(data: &PairData, m: u64, params: &SieveParams) -> Result<SieveReport> {
    check_m(m)?;
    let res = Resolved::new(data, params)?;
    let sums: SieveSums<Rational> = res.sums();
    let (lo, hi) = data.unknown;
    let pess = endpoint(&res, &sums, data, m, hi, true);
    let verdict = if endpoint_holds(&pess, data, m) {
        Verdict::Holds
    } else if data.is_complete() || !endpoint_holds(&endpoint(&res, &sums, data, m, lo, false), data, m) {
        Verdict::Fails
    } else {
        Verdict::Unknown
    };
    Ok(SieveReport {
        q: data.q,
        n: data.n,
        m,
        method: Method::Sieve,
        params: params.clone(),
        s_float: pess.s.as_f64(),
        s_exact: pess.s,
        m_value: pess.m,
        u: pess.u,
        r: pess.r,
        s: sums.s,
        lhs_log2: data.lhs_log2(),
        rhs_log2: pess.rhs_log2,
        verdict,
        complete: data.is_complete(),
    })
}

/// `S` and `M` for the given parameters over the known primes.
pub fn sieve_s_m(data: &PairData, params: &SieveParams) -> Result<(Rational, f64, u32, u32, u64)> {
    let sums: SieveSums<Rational> = SieveSums::new(data, params)?;
    let mv = sums.m_value();
    Ok((sums.delta(), mv, sums.u, sums.r, sums.s))
}

/// `M` for `e' = Q`, `e = q^n - 1` and `g` the product of all factors of `x^{n'} - 1` of degree below `d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowDegreeSieve {
    pub q: u64,
    pub n_prime: u64,
    pub d: u64,
    pub excluded: u64,
    #[serde(serialize_with = "ser_rational")]
    pub s: Rational,
    pub m: f64,
    /// `M < 2 n'`.
    pub bound_ok: bool,
    /// `n' = 6 gcd(n', q - 1)`, where the generic estimate does not apply.
    pub special_case: bool,
}

fn ser_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(r))
}

pub fn low_degree_sieve(q: u64, n_prime: u64) -> Result<LowDegreeSieve> {
    let class = classify_pi(q, n_prime)?;
    if class.d <= 2 {
        return Err(Error::PrecheckFailed(format!("ord_{n_prime}({q}) = {} is not above 2", class.d)));
    }
    let xf = factor_xn_minus_1(q, n_prime)?;
    let excluded: u64 = xf.classes.iter().filter(|c| c.degree == class.d).map(|c| c.count).sum();
    let qd = Pow::pow(&BigInt::from(q), class.d as u32);
    let s = Rational::one() - Rational::new(BigInt::from(2 * excluded), qd);
    let m = m_from(2 * excluded, s.as_f64());
    Ok(LowDegreeSieve {
        q,
        n_prime,
        d: class.d,
        excluded,
        s,
        m,
        bound_ok: m < 2.0 * n_prime as f64,
        special_case: class.case == PiCase::Six,
    })
}

/// Relative error `|a - b| / |b|`.
#[must_use]
pub fn relative_error(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[cfg(test)]
mod tests;
