//! Known-factor cache loaded from a plain-text hint file.
//!
//! Each non-comment line reads `<integer>: <prime> <prime> ...`. Every listed
//! prime is checked for primality and divisibility when the file is parsed.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::Zero;

use super::primality::is_prime;
use crate::error::{Error, Result};

const BUILTIN: &str = include_str!("../../data/factor_hints.txt");

#[derive(Debug, Clone, Default)]
pub struct FactorHintCache {
    entries: BTreeMap<BigUint, Vec<BigUint>>,
}

impl FactorHintCache {
    #[must_use]
    pub fn empty() -> Self {
        Self::default()
    }

    /// Hints shipped with the crate (large prime factors of `7^d - 1` pieces).
    #[must_use]
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("shipped hint file is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cache = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |m: String| Error::InvalidHint(format!("line {}: {m}", lineno + 1));
            let (key, rest) = line.split_once(':').ok_or_else(|| bad("missing ':'".into()))?;
            let key: BigUint = key.trim().parse().map_err(|_| bad(format!("bad integer {key:?}")))?;
            let mut primes = Vec::new();
            for tok in rest.split_whitespace() {
                let p: BigUint = tok.parse().map_err(|_| bad(format!("bad prime {tok:?}")))?;
                if !is_prime(&p) {
                    return Err(bad(format!("{p} is not prime")));
                }
                if !(&key % &p).is_zero() {
                    return Err(bad(format!("{p} does not divide {key}")));
                }
                primes.push(p);
            }
            cache.insert(key, primes);
        }
        Ok(cache)
    }

    pub fn insert(&mut self, n: BigUint, primes: Vec<BigUint>) {
        let slot = self.entries.entry(n).or_default();
        for p in primes {
            if !slot.contains(&p) {
                slot.push(p);
            }
        }
    }

    pub fn merge(&mut self, other: &FactorHintCache) {
        for (k, v) in &other.entries {
            self.insert(k.clone(), v.clone());
        }
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Hint primes dividing `n`.
    pub fn primes_dividing<'a>(&'a self, n: &'a BigUint) -> impl Iterator<Item = &'a BigUint> + 'a {
        self.entries
            .values()
            .flatten()
            .filter(move |p| (n % *p).is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_loads() {
        let c = FactorHintCache::builtin();
        assert!(c.len() > 30);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(FactorHintCache::parse("15: 4").is_err());
        assert!(FactorHintCache::parse("15: 7").is_err());
        assert!(FactorHintCache::parse("15 3 5").is_err());
        let ok = FactorHintCache::parse("# c\n15: 3 5 # trailing\n").unwrap();
        assert_eq!(ok.len(), 1);
    }
}
