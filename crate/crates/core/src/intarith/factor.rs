use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use super::hints::FactorHintCache;
use super::primality::{is_prime, mulmod64};
use super::primes::{trial_primes, TRIAL_LIMIT};
use crate::error::{Error, Result};

/// Prime factorization, possibly with an unfactored composite cofactor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    value: BigUint,
    factors: Vec<(BigUint, u32)>,
    cofactor: BigUint,
}

impl Factorization {
    /// The empty factorization of 1.
    #[must_use]
    pub fn one() -> Self {
        Self { value: BigUint::one(), factors: Vec::new(), cofactor: BigUint::one() }
    }

    /// Builds a factorization from prime powers; `cofactor` must be 1 or composite
    /// with all prime factors above [`TRIAL_LIMIT`].
    #[must_use]
    pub fn from_parts(factors: impl IntoIterator<Item = (BigUint, u32)>, cofactor: BigUint) -> Self {
        let mut map: BTreeMap<BigUint, u32> = BTreeMap::new();
        for (p, e) in factors {
            if e > 0 {
                *map.entry(p).or_default() += e;
            }
        }
        let mut value = cofactor.clone();
        for (p, e) in &map {
            value *= p.pow(*e);
        }
        Self { value, factors: map.into_iter().collect(), cofactor }
    }

    #[must_use]
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// Known prime powers, sorted by prime.
    #[must_use]
    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    #[must_use]
    pub fn primes(&self) -> Vec<BigUint> {
        self.factors.iter().map(|(p, _)| p.clone()).collect()
    }

    #[must_use]
    pub fn cofactor(&self) -> &BigUint {
        &self.cofactor
    }

    #[must_use]
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }

    pub(crate) fn require_complete(&self) -> Result<()> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(Error::IncompleteFactorization(self.value.to_string()))
        }
    }

    /// Factorization of the product.
    #[must_use]
    pub fn merge(&self, other: &Factorization) -> Factorization {
        Self::from_parts(
            self.factors.iter().chain(other.factors.iter()).cloned(),
            &self.cofactor * &other.cofactor,
        )
    }

    /// All divisors (complete factorizations only), ascending.
    pub fn divisors(&self) -> Result<Vec<BigUint>> {
        self.require_complete()?;
        let mut out = vec![BigUint::one()];
        for (p, e) in &self.factors {
            let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
            for d in &out {
                let mut pk = d.clone();
                next.push(pk.clone());
                for _ in 0..*e {
                    pk *= p;
                    next.push(pk.clone());
                }
            }
            out = next;
        }
        out.sort();
        Ok(out)
    }

    /// Squarefree divisors (complete factorizations only), ascending.
    pub fn squarefree_divisors(&self) -> Result<Vec<BigUint>> {
        self.require_complete()?;
        let mut out = vec![BigUint::one()];
        for (p, _) in &self.factors {
            let extra: Vec<BigUint> = out.iter().map(|d| d * p).collect();
            out.extend(extra);
        }
        out.sort();
        Ok(out)
    }
}

impl Serialize for Factorization {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Factorization", 4)?;
        st.serialize_field("value", &self.value.to_string())?;
        let fs: Vec<(String, u32)> = self.factors.iter().map(|(p, e)| (p.to_string(), *e)).collect();
        st.serialize_field("factors", &fs)?;
        st.serialize_field("cofactor", &self.cofactor.to_string())?;
        st.serialize_field("complete", &self.is_complete())?;
        st.end()
    }
}

/// Work limit for Pollard-Brent rho.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Total rho iterations allowed per call to [`factorize`].
    pub rho_iterations: u64,
    /// Optional wall-clock cap; makes results timing dependent.
    pub time_limit: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Self { rho_iterations: 1 << 22, time_limit: None }
    }
}

struct Meter {
    left: u64,
    deadline: Option<Instant>,
}

impl Meter {
    fn spend(&mut self, k: u64) -> bool {
        if self.left < k {
            self.left = 0;
            return false;
        }
        self.left -= k;
        match self.deadline {
            Some(d) => Instant::now() < d,
            None => true,
        }
    }
}

fn rho_u64(n: u64, c: u64, meter: &mut Meter) -> Option<u64> {
    const M: u64 = 128;
    let f = |x: u64| (mulmod64(x, x, n) + c) % n;
    let (mut y, mut r, mut q, mut g) = (2 % n, 1u64, 1u64, 1u64);
    let (mut x, mut ys) = (y, y);
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = M.min(r - k);
            for _ in 0..steps {
                y = f(y);
                q = mulmod64(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += steps;
            if !meter.spend(steps) {
                return None;
            }
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn rho_big(n: &BigUint, c: &BigUint, meter: &mut Meter) -> Option<BigUint> {
    const M: u64 = 128;
    let f = |x: &BigUint| (x * x + c) % n;
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut y = BigUint::from(2u32);
    let (mut r, mut q, mut g) = (1u64, BigUint::one(), BigUint::one());
    let mut x = y.clone();
    let mut ys = y.clone();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = M.min(r - k);
            for _ in 0..steps {
                y = f(&y);
                q = q * diff(&x, &y) % n;
            }
            g = q.gcd(n);
            k += steps;
            if !meter.spend(steps) {
                return None;
            }
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// Finds a nontrivial divisor of the composite `n`, trying several polynomials.
fn split(n: &BigUint, meter: &mut Meter) -> Option<BigUint> {
    // Deterministic constants derived from n.
    let seed = (n % 1_000_003u32).to_u64().unwrap_or(0);
    for i in 0..16u64 {
        let c = 1 + (seed + 7919 * i) % 1_000_000;
        let found = match n.to_u64() {
            Some(small) => rho_u64(small, c % small.max(3), meter).map(BigUint::from),
            None => rho_big(n, &BigUint::from(c), meter),
        };
        if found.is_some() {
            return found;
        }
        if meter.left == 0 {
            return None;
        }
    }
    None
}

fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits() as u32;
    let max_k = bits / 20 + 1;
    for k in (2..=max_k.max(2)).rev() {
        let r = n.nth_root(k);
        if r > BigUint::one() && &r.pow(k) == n {
            return Some((r, k));
        }
    }
    None
}

/// Factors `n` by trial division below [`TRIAL_LIMIT`], hint primes and
/// Pollard-Brent rho. Whatever survives the budget becomes the cofactor.
pub fn factorize(n: &BigUint, hints: &FactorHintCache, budget: &Budget) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("cannot factor 0".into()));
    }
    let mut found: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut rem = n.clone();
    for &p in trial_primes() {
        if let Some(r) = rem.to_u64() {
            if p.saturating_mul(p) > r {
                break;
            }
        }
        if (&rem % p).is_zero() {
            let mut e = 0;
            while (&rem % p).is_zero() {
                rem /= p;
                e += 1;
            }
            found.insert(BigUint::from(p), e);
        }
    }
    let mut meter = Meter {
        left: budget.rho_iterations,
        deadline: budget.time_limit.map(|d| Instant::now() + d),
    };
    let mut cofactor = BigUint::one();
    let mut stack = vec![rem];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if m.to_u64().is_some_and(|v| v < TRIAL_LIMIT * TRIAL_LIMIT) || is_prime(&m) {
            *found.entry(m).or_default() += 1;
            continue;
        }
        if let Some((r, k)) = perfect_power(&m) {
            stack.extend(std::iter::repeat(r).take(k as usize));
            continue;
        }
        if let Some(p) = hints.primes_dividing(&m).next() {
            let p = p.clone();
            stack.push(&m / &p);
            stack.push(p);
            continue;
        }
        match split(&m, &mut meter) {
            Some(d) => {
                stack.push(&m / &d);
                stack.push(d);
            }
            None => cofactor *= m,
        }
    }
    Ok(Factorization::from_parts(found, cofactor))
}

/// `Phi_d(b)` for `d >= 1`, exactly.
#[must_use]
pub fn cyclotomic_value(d: u64, b: &BigUint) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for e in divisors_u64(d) {
        let term = b.pow(e as u32) - 1u32;
        match mobius_u64(d / e) {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    num / den
}

pub(crate) fn divisors_u64(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            small.push(i);
            if i * i != n {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub(crate) fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub(crate) fn mobius_u64(n: u64) -> i32 {
    let f = factor_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Writes `q = b^j` with `b` not a perfect power.
#[must_use]
pub fn perfect_power_root(q: u64) -> (u64, u32) {
    for j in (2..=63u32).rev() {
        let b = (q as f64).powf(1.0 / f64::from(j)).round() as u64;
        for cand in b.saturating_sub(1)..=b + 1 {
            if cand >= 2 && cand.checked_pow(j) == Some(q) {
                return (cand, j);
            }
        }
    }
    (q, 1)
}

/// One cyclotomic piece `Phi_d(base)` of `q^n - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclotomicPiece {
    pub base: u64,
    pub index: u64,
    #[serde(serialize_with = "ser_big")]
    pub value: BigUint,
}

fn ser_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Splits `q^n - 1` into cyclotomic values.
///
/// With `q = b^j` (`b` not a perfect power) the pieces are `Phi_d(b)` for
/// `d | j n`, a refinement of the split by `Phi_d(q)`, `d | n`.
#[must_use]
pub fn cyclotomic_pieces(q: u64, n: u64) -> Vec<CyclotomicPiece> {
    let (b, j) = perfect_power_root(q);
    let big_b = BigUint::from(b);
    divisors_u64(u64::from(j) * n)
        .into_iter()
        .map(|d| CyclotomicPiece { base: b, index: d, value: cyclotomic_value(d, &big_b) })
        .collect()
}

/// Factorizer carrying hints, a budget and a memo of finished results.
#[derive(Debug, Default)]
pub struct Factorizer {
    hints: FactorHintCache,
    budget: Budget,
    memo: Mutex<HashMap<BigUint, Factorization>>,
}

impl Factorizer {
    #[must_use]
    pub fn new(hints: FactorHintCache, budget: Budget) -> Self {
        Self { hints, budget, memo: Mutex::new(HashMap::new()) }
    }

    /// Shipped hints and the default budget.
    #[must_use]
    pub fn with_builtin_hints() -> Self {
        Self::new(FactorHintCache::builtin(), Budget::default())
    }

    #[must_use]
    pub fn hints(&self) -> &FactorHintCache {
        &self.hints
    }

    #[must_use]
    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn factorize(&self, n: &BigUint) -> Result<Factorization> {
        if let Some(f) = self.memo.lock().expect("memo lock").get(n) {
            return Ok(f.clone());
        }
        let f = factorize(n, &self.hints, &self.budget)?;
        self.memo.lock().expect("memo lock").insert(n.clone(), f.clone());
        Ok(f)
    }

    pub fn factorize_u64(&self, n: u64) -> Result<Factorization> {
        self.factorize(&BigUint::from(n))
    }

    /// Factorization of `q^n - 1` assembled from its cyclotomic pieces.
    pub fn factorize_power_minus_one(&self, q: u64, n: u64) -> Result<Factorization> {
        if q < 2 || n == 0 {
            return Err(Error::InvalidArgument(format!("q^n - 1 with q={q}, n={n}")));
        }
        let mut acc = Factorization::one();
        for piece in cyclotomic_pieces(q, n) {
            acc = acc.merge(&self.factorize(&piece.value)?);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fz(n: u64) -> Factorization {
        factorize(&BigUint::from(n), &FactorHintCache::empty(), &Budget::default()).unwrap()
    }

    fn pairs(f: &Factorization) -> Vec<(u64, u32)> {
        f.factors().iter().map(|(p, e)| (p.to_u64().unwrap(), *e)).collect()
    }

    #[test]
    fn small_factorizations() {
        assert_eq!(pairs(&fz(117_648)), vec![(2, 4), (3, 2), (19, 1), (43, 1)]);
        assert_eq!(pairs(&fz(1)), vec![]);
        assert!(fz(1).is_complete());
        let semi = 1_000_003u64 * 1_000_033;
        assert_eq!(pairs(&fz(semi)), vec![(1_000_003, 1), (1_000_033, 1)]);
        let sq = 1_000_003u64 * 1_000_003;
        assert_eq!(pairs(&fz(sq)), vec![(1_000_003, 2)]);
    }

    #[test]
    fn big_semiprime_by_rho() {
        let p: BigUint = "1000000000039".parse().unwrap();
        let q: BigUint = "99999999977".parse().unwrap();
        let n = &p * &q * BigUint::from(12u32);
        let f = factorize(&n, &FactorHintCache::empty(), &Budget::default()).unwrap();
        assert!(f.is_complete());
        assert_eq!(f.value(), &n);
        assert!(f.factors().iter().any(|(x, _)| x == &p));
    }

    #[test]
    fn exhausted_budget_leaves_cofactor() {
        let p: BigUint = "1000000000000000003".parse().unwrap();
        let q: BigUint = "1000000000000000009".parse().unwrap();
        let n = &p * &q;
        let tight = Budget { rho_iterations: 1000, time_limit: None };
        let f = factorize(&n, &FactorHintCache::empty(), &tight).unwrap();
        assert!(!f.is_complete());
        assert_eq!(f.cofactor(), &n);
        let mut hints = FactorHintCache::empty();
        hints.insert(n.clone(), vec![p.clone()]);
        let f = factorize(&n, &hints, &tight).unwrap();
        assert!(f.is_complete());
    }

    #[test]
    fn cyclotomic_split_of_7_6() {
        let pieces = cyclotomic_pieces(7, 6);
        let vals: Vec<(u64, u64)> = pieces.iter().map(|p| (p.index, p.value.to_u64().unwrap())).collect();
        assert_eq!(vals, vec![(1, 6), (2, 8), (3, 57), (6, 43)]);
        let f = Factorizer::default().factorize_power_minus_one(7, 6).unwrap();
        assert_eq!(f.value(), &BigUint::from(117_648u32));
    }

    #[test]
    fn prime_power_bases() {
        assert_eq!(perfect_power_root(343), (7, 3));
        assert_eq!(perfect_power_root(64), (2, 6));
        assert_eq!(perfect_power_root(12), (12, 1));
        let f = Factorizer::default().factorize_power_minus_one(49, 5).unwrap();
        assert_eq!(f.value(), &(BigUint::from(49u32).pow(5) - 1u32));
        assert!(f.is_complete());
    }

    #[test]
    fn divisor_lists() {
        let f = fz(12);
        let d: Vec<u64> = f.divisors().unwrap().iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(d, vec![1, 2, 3, 4, 6, 12]);
        let s: Vec<u64> = f.squarefree_divisors().unwrap().iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(s, vec![1, 2, 3, 6]);
    }
}
