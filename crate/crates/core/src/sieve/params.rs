use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffield::{parse_fraction, PolyRing, PrimeField};
use crate::intarith::{divisors_u64, multiplicative_order};
use crate::polyfactor::{characteristic_of, cyclotomic_poly_mod_p, split_n, XnFactorization};

/// A divisor of `Q` or of `q^n - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Divisor {
    /// The whole number, including any unresolved cofactor.
    Full,
    Value(BigUint),
}

impl Divisor {
    /// `Q`, `full` or a decimal integer.
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "Q" | "full" | "q^n-1" => Ok(Divisor::Full),
            t => t
                .parse::<BigUint>()
                .map(Divisor::Value)
                .map_err(|_| Error::InvalidArgument(format!("bad divisor {t:?}"))),
        }
    }

    fn label(&self, full: &str) -> String {
        match self {
            Divisor::Full => full.to_string(),
            Divisor::Value(v) => v.to_string(),
        }
    }
}

impl From<u64> for Divisor {
    fn from(v: u64) -> Self {
        Divisor::Value(BigUint::from(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Selection {
    Full,
    /// Included factors per degree.
    Counts(BTreeMap<u64, u64>),
}

/// A monic divisor `g` of `x^n - 1`, recorded by how many factors of each degree it contains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSelection {
    sel: Selection,
    label: Option<String>,
}

impl FactorSelection {
    /// `g = 1`.
    #[must_use]
    pub fn none() -> Self {
        Self { sel: Selection::Counts(BTreeMap::new()), label: None }
    }

    /// `g = x^n - 1`.
    #[must_use]
    pub fn full() -> Self {
        Self { sel: Selection::Full, label: None }
    }

    #[must_use]
    pub fn from_counts(counts: BTreeMap<u64, u64>) -> Self {
        let counts = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        Self { sel: Selection::Counts(counts), label: None }
    }

    /// The selection of a polynomial `g | x^n - 1` with coefficients in `F_p`, e.g. `x^6+6` or
    /// `(x^48-1)/(x^12-1)`.
    ///
    /// The `F_q`-irreducible factors of `g` dividing `Phi_t` number `deg gcd(g, Phi_t) / ord_t(q)`.
    pub fn from_polynomial(q: u64, n: u64, text: &str) -> Result<Self> {
        let p = characteristic_of(q)?;
        let fp = PrimeField::new(p);
        let ring = PolyRing::new(&fp);
        let (num, den) = parse_fraction(text, &fp, None)?;
        let g = ring
            .exact_div(&num, &den)
            .ok_or_else(|| Error::InvalidArgument(format!("{text:?} is not a polynomial")))?;
        if ring.lead(&g) != Some(1) {
            return Err(Error::InvalidArgument(format!("{text:?} is not monic")));
        }
        if !ring.is_zero(&ring.rem(&ring.x_pow_minus_one(n as usize), &g)) {
            return Err(Error::InvalidArgument(format!("{text:?} does not divide x^{n}-1")));
        }
        let (n_prime, _) = split_n(q, n)?;
        let mut counts = BTreeMap::new();
        for t in divisors_u64(n_prime) {
            let h = ring.gcd(&g, &cyclotomic_poly_mod_p(p, t));
            let deg = ring.degree(&h).unwrap_or(0) as u64;
            let d = multiplicative_order(q, t)?;
            *counts.entry(d).or_insert(0) += deg / d;
        }
        Ok(Self::from_counts(counts).with_label(text))
    }

    /// `1`, `full`, `x^n-1`, a per-degree list `d:c;d:c`, or a polynomial.
    pub fn parse(q: u64, n: u64, text: &str) -> Result<Self> {
        let t = text.trim();
        match t {
            "1" => Ok(Self::none()),
            "full" | "x^n-1" => Ok(Self::full()),
            _ if t.contains(':') => {
                let mut counts = BTreeMap::new();
                for part in t.split(';') {
                    let (d, c) = part
                        .split_once(':')
                        .ok_or_else(|| Error::InvalidArgument(format!("bad degree count {part:?}")))?;
                    let parse = |s: &str| {
                        s.trim().parse::<u64>().map_err(|_| Error::InvalidArgument(format!("bad number {s:?}")))
                    };
                    *counts.entry(parse(d)?).or_insert(0) += parse(c)?;
                }
                Ok(Self::from_counts(counts))
            }
            _ => Self::from_polynomial(q, n, t),
        }
    }

    #[must_use]
    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    #[must_use]
    pub fn is_full(&self) -> bool {
        self.sel == Selection::Full
    }

    /// Included factors per degree, checked against the available ones.
    pub fn resolve(&self, xn: &XnFactorization) -> Result<BTreeMap<u64, u64>> {
        let avail: BTreeMap<u64, u64> = xn.distinct_factors().into_iter().collect();
        match &self.sel {
            Selection::Full => Ok(avail),
            Selection::Counts(c) => {
                for (d, k) in c {
                    if avail.get(d).copied().unwrap_or(0) < *k {
                        return Err(Error::InvalidArgument(format!(
                            "x^{}-1 has fewer than {k} irreducible factors of degree {d}",
                            xn.n
                        )));
                    }
                }
                Ok(c.clone())
            }
        }
    }

    #[must_use]
    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match &self.sel {
            Selection::Full => "x^n-1".into(),
            Selection::Counts(c) if c.is_empty() => "1".into(),
            Selection::Counts(c) => c.iter().map(|(d, k)| format!("{d}:{k}")).collect::<Vec<_>>().join(";"),
        }
    }
}

/// Sieve parameters `e' | Q`, `e | q^n - 1`, `g | x^n - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveParams {
    pub e_prime: Divisor,
    pub e: Divisor,
    pub g: FactorSelection,
}

impl SieveParams {
    /// `e' = Q`, `e = q^n - 1`, `g = x^n - 1`.
    #[must_use]
    pub fn trivial() -> Self {
        Self { e_prime: Divisor::Full, e: Divisor::Full, g: FactorSelection::full() }
    }

    #[must_use]
    pub fn new(e_prime: impl Into<Divisor>, e: impl Into<Divisor>, g: FactorSelection) -> Self {
        Self { e_prime: e_prime.into(), e: e.into(), g }
    }

    #[must_use]
    pub fn e_prime_label(&self) -> String {
        self.e_prime.label("Q")
    }

    #[must_use]
    pub fn e_label(&self) -> String {
        self.e.label("q^n-1")
    }
}

impl Serialize for SieveParams {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SieveParams", 4)?;
        st.serialize_field("e_prime", &self.e_prime_label())?;
        st.serialize_field("e", &self.e_label())?;
        st.serialize_field("g", &self.g.label())?;
        match &self.g.sel {
            Selection::Full => st.serialize_field("g_degrees", "all")?,
            Selection::Counts(c) => st.serialize_field("g_degrees", &c.iter().collect::<Vec<_>>())?,
        }
        st.end()
    }
}

/// Product of the given primes.
pub(crate) fn product(ps: &[BigUint]) -> BigUint {
    ps.iter().fold(BigUint::one(), |acc, p| acc * p)
}
