use std::collections::HashSet;

use num_bigint::BigUint;
use prenorm::ffield::{Field, FieldContext, FieldElement, PolyOverFq, PolyRing};
use prenorm::intarith::{is_prime_u64, perfect_power_root, Factorization, Factorizer};

fn contexts(limit: u64) -> Vec<FieldContext> {
    let mut out = Vec::new();
    for q in (2..=limit).filter(|&q| is_prime_u64(perfect_power_root(q).0)) {
        let (p, k) = perfect_power_root(q);
        let mut n = 1u32;
        while q.checked_pow(n).is_some_and(|s| s <= limit) {
            out.push(FieldContext::build(p, k as usize, n as usize, 0, &Factorizer::default()).unwrap());
            n += 1;
        }
    }
    out
}

fn elements(c: &FieldContext) -> Vec<FieldElement> {
    (0..c.ext().size_u64().unwrap()).map(|i| c.ext().from_index_u64(i)).collect()
}

fn divisor_factorization(order: &Factorization, e: &BigUint) -> Factorization {
    Factorization::from_parts(
        order.factors().iter().map(|(p, _)| {
            let mut v = 0;
            let mut r = e.clone();
            while (&r % p) == BigUint::ZERO {
                r /= p;
                v += 1;
            }
            (p.clone(), v)
        }),
        BigUint::from(1u32),
    )
}

/// Monic divisors of `x^n - 1` other than 1.
fn proper_xn_divisors(c: &FieldContext) -> Vec<PolyOverFq> {
    let ring = PolyRing::new(c.base());
    let mut out = vec![ring.one()];
    for f in c.xn_factors() {
        let mut next = Vec::new();
        for g in &out {
            let mut cur = g.clone();
            next.push(cur.clone());
            for _ in 0..f.multiplicity {
                cur = ring.mul(&cur, &f.poly);
                next.push(cur.clone());
            }
        }
        out = next;
    }
    out.retain(|g| g.coeffs.len() > 1);
    out
}

#[test]
fn e_free_matches_definition() {
    for c in contexts(1000) {
        let ext = c.ext();
        let all = elements(&c);
        let order = c.order_factorization();
        let divisors = order.divisors().unwrap();
        // d-th powers of nonzero elements, per divisor d > 1.
        let powers: Vec<(BigUint, HashSet<FieldElement>)> = divisors
            .iter()
            .filter(|d| **d > BigUint::from(1u32))
            .map(|d| (d.clone(), all[1..].iter().map(|x| ext.pow(x, d)).collect()))
            .collect();
        for e in &divisors {
            let ef = divisor_factorization(order, e);
            for x in &all[1..] {
                let defined = !powers.iter().any(|(d, set)| (e % d) == BigUint::ZERO && set.contains(x));
                assert_eq!(c.is_e_free(x, &ef).unwrap(), defined, "q={} n={} e={e}", c.q(), c.n());
            }
        }
    }
}

#[test]
fn g_free_matches_definition() {
    for c in contexts(1000) {
        let all = elements(&c);
        let hs = proper_xn_divisors(&c);
        let images: Vec<(PolyOverFq, HashSet<FieldElement>)> =
            hs.iter().map(|h| (h.clone(), all.iter().map(|x| c.module_action(h, x)).collect())).collect();
        let ring = PolyRing::new(c.base());
        for g in hs.iter().chain([&ring.one()]) {
            for x in &all {
                let defined = !images
                    .iter()
                    .any(|(h, set)| ring.is_zero(&ring.rem(g, h)) && set.contains(x));
                assert_eq!(c.is_g_free(x, g), defined, "q={} n={}", c.q(), c.n());
            }
        }
    }
}
