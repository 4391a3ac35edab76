//! Primality testing: deterministic Miller-Rabin below 3.317e24, BPSW above.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const SMALL_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

#[inline]
pub(crate) fn mulmod64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod64(r, b, m);
        }
        b = mulmod64(b, b, m);
        e >>= 1;
    }
    r
}

fn mr_round64(n: u64, d: u64, s: u32, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let mut x = powmod64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mulmod64(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic for every `u64`.
#[must_use]
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in SMALL_BASES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    SMALL_BASES[..12].iter().all(|&a| mr_round64(n, d, s, a))
}

fn mr_round(n: &BigUint, d: &BigUint, s: u64, a: &BigUint) -> bool {
    let n1 = n - 1u32;
    let mut x = a.modpow(d, n);
    if x.is_one() || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n1 {
            return true;
        }
    }
    false
}

fn miller_rabin(n: &BigUint, bases: &[u64]) -> bool {
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    bases.iter().all(|&a| mr_round(n, &d, s, &BigUint::from(a)))
}

fn jacobi(a: &BigInt, n: &BigInt) -> i32 {
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut t = 1;
    let three = BigInt::from(3);
    let five = BigInt::from(5);
    let eight = BigInt::from(8);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&BigInt::from(4)) == three && n.mod_floor(&BigInt::from(4)) == three {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

fn half_mod(x: BigInt, n: &BigInt) -> BigInt {
    let x = if x.is_odd() { x + n } else { x };
    let h: BigInt = x >> 1;
    h.mod_floor(n)
}

/// Strong Lucas probable-prime test with Selfridge parameters.
fn strong_lucas(n: &BigUint) -> bool {
    let sq = n.sqrt();
    if &(&sq * &sq) == n {
        return false;
    }
    let nn = BigInt::from(n.clone());
    let mut d = 5i64;
    loop {
        match jacobi(&BigInt::from(d), &nn) {
            -1 => break,
            0 if BigInt::from(d.abs()) != nn => return false,
            _ => {}
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let big_d = BigInt::from(d);
    let p = BigInt::one();
    let q = BigInt::from((1 - d) / 4);

    let m: BigInt = &nn + 1;
    let s = m.trailing_zeros().unwrap_or(0);
    let k = &m >> s;

    let mut u = BigInt::one();
    let mut v = p.clone();
    let mut qk = q.mod_floor(&nn);
    let bits = k.bits();
    for i in (0..bits - 1).rev() {
        u = (&u * &v).mod_floor(&nn);
        v = (&v * &v - (&qk << 1u32)).mod_floor(&nn);
        qk = (&qk * &qk).mod_floor(&nn);
        if k.bit(i) {
            let nu = half_mod(&p * &u + &v, &nn);
            let nv = half_mod(&big_d * &u + &p * &v, &nn);
            u = nu;
            v = nv;
            qk = (&qk * &q).mod_floor(&nn);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v - (&qk << 1u32)).mod_floor(&nn);
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk).mod_floor(&nn);
    }
    false
}

/// Primality of an arbitrary non-negative integer.
///
/// Deterministic below `3.317e24` (Miller-Rabin with the first 13 prime bases);
/// above that, Baillie-PSW.
#[must_use]
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    for &p in &super::primes::trial_primes()[..168] {
        if (n % p).is_zero() {
            return false;
        }
    }
    let mr_limit: BigUint = "3317044064679887385961981".parse().unwrap();
    if n < &mr_limit {
        miller_rabin(n, &SMALL_BASES)
    } else {
        miller_rabin(n, &[2]) && strong_lucas(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let from_sieve = super::super::primes::primes_upto(10_000);
        let from_test: Vec<u64> = (0..=10_000).filter(|&k| is_prime_u64(k)).collect();
        assert_eq!(from_sieve, from_test);
    }

    #[test]
    fn strong_pseudoprimes_rejected() {
        // Strong pseudoprime to the first twelve prime bases.
        let psp: BigUint = "318665857834031151167461".parse().unwrap();
        assert!(!is_prime(&psp));
        let carmichael: BigUint = "3825123056546413051".parse().unwrap();
        assert!(!is_prime(&carmichael));
    }

    #[test]
    fn large_primes() {
        let m127 = (BigUint::one() << 127u32) - 1u32;
        assert!(is_prime(&m127));
        let m128 = (BigUint::one() << 128u32) - 1u32;
        assert!(!is_prime(&m128));
        let p: BigUint = "285917932930729262773854471418794183208735026049402141999388275408759"
            .parse()
            .unwrap();
        assert!(is_prime(&p));
        assert!(!is_prime(&(&p * &m127)));
        assert!(!is_prime(&(&p * &p)));
    }

    #[test]
    fn lucas_alone_on_known_primes() {
        for p in [1_000_000_007u64, 998_244_353, 2_305_843_009_213_693_951] {
            assert!(strong_lucas(&BigUint::from(p)));
        }
        assert!(!strong_lucas(&BigUint::from(1_000_000_007u64 * 998_244_353)));
    }
}
