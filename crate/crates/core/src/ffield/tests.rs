use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::*;
use crate::intarith::Factorizer;

fn ctx(p: u64, k: usize, n: usize) -> FieldContext {
    FieldContext::build(p, k, n, 0, &Factorizer::default()).unwrap()
}

fn all(c: &FieldContext) -> Vec<FieldElement> {
    let size = c.ext().size_u64().unwrap();
    (0..size).map(|i| c.ext().from_index_u64(i)).collect()
}

#[test]
fn f4_basics() {
    let c = ctx(2, 1, 2);
    assert_eq!(c.ext().modulus(), &[1, 1, 1]);
    let alpha = c.ext().gen();
    let a2 = c.frobenius(&alpha, 1);
    assert_eq!(a2, c.ext().add(&alpha, &c.ext().one()));
    assert_eq!(c.frobenius(&alpha, 0), alpha);
    assert_eq!(c.frobenius(&alpha, 2), alpha);
    assert!(c.is_normal(&alpha));
    let json = serde_json::to_string(&c.descriptor()).unwrap();
    assert!(json.contains("\"qn\":[1,1,1]"));
}

#[test]
fn generator_of_f49() {
    let c = ctx(7, 1, 2);
    let g = c.generator().unwrap();
    assert_eq!(c.element_order(g).unwrap(), BigUint::from(48u32));
    assert!(c.is_primitive(g).unwrap());
    assert_eq!(c.element_order(&c.ext().one()).unwrap(), BigUint::from(1u32));
}

#[test]
fn tower_over_f9() {
    let c = ctx(3, 2, 2);
    for e in all(&c) {
        assert!(c.restrict(&c.embed(&c.trace(&e))).is_some());
        if !c.ext().is_zero(&e) {
            assert!(c.prenorm(&e).is_ok());
        }
    }
    for i in 0..9 {
        let a = c.base().from_index_u64(i);
        assert_eq!(c.restrict(&c.embed(&a)), Some(a.clone()));
        assert_eq!(c.frobenius(&c.embed(&a), 1), c.embed(&a));
    }
}

#[test]
fn trace_norm_units() {
    for (p, k, n) in [(2, 1, 3), (3, 1, 4), (5, 1, 2), (2, 2, 3)] {
        let c = ctx(p, k, n);
        let one = c.ext().one();
        let zero = c.ext().zero();
        assert_eq!(c.trace(&one), c.base().from_int(n as u64));
        assert_eq!(c.norm(&one), c.base().one());
        assert_eq!(c.norm(&zero), c.base().zero());
        assert_eq!(c.trace(&zero), c.base().zero());
        assert_eq!(c.prenorm(&one).unwrap(), c.base().from_int(n as u64));
        assert!(c.prenorm(&zero).is_err());
    }
    assert!(ctx(7, 1, 1).prenorm(&ctx(7, 1, 1).ext().one()).is_err());
}

#[test]
fn prenorm_identities_f49() {
    let c = ctx(7, 1, 2);
    let b = c.base();
    for e in all(&c).into_iter().skip(1) {
        let pn = c.prenorm(&e).unwrap();
        let inv = c.ext().inv(&e).unwrap();
        assert_eq!(pn, b.mul(&c.trace(&inv), &c.norm(&e)));
        let mp = c.minimal_polynomial(&e);
        if mp.coeffs.len() == 3 {
            // (-1)^(n-1) a_1 with n = 2.
            assert_eq!(pn, b.neg(&mp.coeffs[1]));
        }
        assert_eq!(mp.coeffs[0], if mp.coeffs.len() == 3 { c.norm(&e) } else { b.neg(&c.restrict(&e).unwrap()) });
    }
}

#[test]
fn minimal_polynomials() {
    let c = ctx(3, 1, 2);
    let g = c.generator().unwrap().clone();
    let mp = c.minimal_polynomial(&g);
    assert_eq!(mp.coeffs.len(), 3);
    assert!(!c.base().is_zero(&mp.coeffs[0]));
    let two = c.ext().from_int(2);
    assert_eq!(c.minimal_polynomial(&two).coeffs.len(), 2);
    let c3 = ctx(2, 1, 3);
    for e in all(&c3) {
        let mp = c3.minimal_polynomial(&e);
        if mp.coeffs.len() == 4 {
            assert_eq!(mp.coeffs[0], c3.norm(&e));
        }
    }
}

#[test]
fn primitive_count_f16() {
    let c = ctx(2, 1, 4);
    let n = all(&c).iter().skip(1).filter(|e| c.is_primitive(e).unwrap()).count();
    assert_eq!(n, 8);
}

#[test]
fn e_free_examples() {
    let c = ctx(3, 1, 2);
    let fz = Factorizer::default();
    let one = fz.factorize_u64(1).unwrap();
    let two = fz.factorize_u64(2).unwrap();
    let full = c.order_factorization().clone();
    for e in all(&c).into_iter().skip(1) {
        assert!(c.is_e_free(&e, &one).unwrap());
        if c.element_order(&e).unwrap().to_u64() == Some(4) {
            assert!(!c.is_e_free(&e, &two).unwrap());
        }
        assert_eq!(c.is_e_free(&e, &full).unwrap(), c.is_primitive(&e).unwrap());
    }
    assert!(c.is_e_free(&c.ext().one(), &fz.factorize_u64(3).unwrap()).is_err());
}

#[test]
fn module_action_examples() {
    let c = ctx(5, 1, 3);
    let br = PolyRing::new(c.base());
    let x_minus_1 = Poly::new(vec![c.base().from_int(4), c.base().one()]);
    let xn1 = br.x_pow_minus_one(3);
    for e in all(&c).into_iter().step_by(7) {
        let expect = c.ext().sub(&c.frobenius(&e, 1), &e);
        assert_eq!(c.module_action(&x_minus_1, &e), expect);
        assert!(c.ext().is_zero(&c.module_action(&xn1, &e)));
        assert_eq!(c.module_action(&br.one(), &e), e);
        let h2 = Poly::new(vec![c.base().from_int(2), c.base().zero(), c.base().one()]);
        let lhs = c.module_action(&br.mul(&x_minus_1, &h2), &e);
        assert_eq!(lhs, c.module_action(&x_minus_1, &c.module_action(&h2, &e)));
    }
}

#[test]
fn fq_order_examples() {
    let c = ctx(3, 1, 4);
    let br = PolyRing::new(c.base());
    assert_eq!(c.fq_order(&c.ext().one()), Poly::new(vec![c.base().from_int(2), c.base().one()]));
    assert_eq!(c.fq_order(&c.ext().zero()), br.one());
    assert!(!c.is_normal(&c.ext().one()));
    assert!(!c.is_normal(&c.ext().zero()));
    let xn1 = br.x_pow_minus_one(4);
    for e in all(&c) {
        let ord = c.fq_order(&e);
        assert!(c.ext().is_zero(&c.module_action(&ord, &e)));
        assert!(br.is_zero(&br.rem(&xn1, &ord)));
        assert_eq!(c.is_normal(&e), ord == xn1);
    }
}

#[test]
fn characteristic_p_n() {
    // x^3 - 1 = (x - 1)^3 over F_3: multiplicity handling in the F_q-order.
    let c = ctx(3, 1, 3);
    let br = PolyRing::new(c.base());
    let xn1 = br.x_pow_minus_one(3);
    let normal = all(&c).iter().filter(|e| c.is_normal(e)).count();
    assert_eq!(normal, 18);
    for e in all(&c) {
        assert_eq!(c.is_normal(&e), c.fq_order(&e) == xn1);
    }
}

mod props {
    use proptest::prelude::*;

    use super::*;

    const TOWERS: [(u64, usize, usize); 6] = [(2, 1, 5), (3, 1, 3), (2, 2, 3), (5, 1, 3), (3, 2, 2), (7, 1, 4)];

    fn pick(c: &FieldContext, i: u64) -> FieldElement {
        c.ext().from_index_u64(i % c.ext().size_u64().unwrap())
    }

    proptest! {
        #[test]
        fn trace_linear_norm_multiplicative(t in 0usize..6, i in any::<u64>(), j in any::<u64>(), a in any::<u64>()) {
            let (p, k, n) = TOWERS[t];
            let c = ctx(p, k, n);
            let (x, y) = (pick(&c, i), pick(&c, j));
            let a = c.base().from_index_u64(a % c.q());
            let ext = c.ext();
            let lhs = c.trace(&ext.add(&ext.mul(&c.embed(&a), &x), &y));
            prop_assert_eq!(lhs, c.base().add(&c.base().mul(&a, &c.trace(&x)), &c.trace(&y)));
            prop_assert_eq!(c.norm(&ext.mul(&x, &y)), c.base().mul(&c.norm(&x), &c.norm(&y)));
        }

        #[test]
        fn frobenius_is_an_automorphism_fixing_the_base(t in 0usize..6, i in any::<u64>(), j in any::<u64>(), a in any::<u64>()) {
            let (p, k, n) = TOWERS[t];
            let c = ctx(p, k, n);
            let (x, y) = (pick(&c, i), pick(&c, j));
            let ext = c.ext();
            let f = |e: &FieldElement| c.frobenius_once(e);
            prop_assert_eq!(f(&ext.add(&x, &y)), ext.add(&f(&x), &f(&y)));
            prop_assert_eq!(f(&ext.mul(&x, &y)), ext.mul(&f(&x), &f(&y)));
            prop_assert_eq!(c.frobenius(&x, n as i64), x.clone());
            let a = c.embed(&c.base().from_index_u64(a % c.q()));
            prop_assert_eq!(f(&a), a);
        }

        #[test]
        fn prenorm_lies_in_base_field(t in 0usize..6, i in any::<u64>()) {
            let (p, k, n) = TOWERS[t];
            let c = ctx(p, k, n);
            let x = pick(&c, i);
            prop_assume!(!c.ext().is_zero(&x));
            let pn = c.prenorm(&x).unwrap();
            let inv = c.ext().inv(&x).unwrap();
            prop_assert_eq!(&pn, &c.base().mul(&c.trace(&inv), &c.norm(&x)));
            let mp = c.minimal_polynomial(&x);
            if mp.coeffs.len() == n + 1 {
                let a1 = mp.coeffs[1].clone();
                prop_assert_eq!(pn, if n % 2 == 1 { a1 } else { c.base().neg(&a1) });
            }
        }
    }
}
