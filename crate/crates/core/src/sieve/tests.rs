use std::collections::BTreeMap;

use num_bigint::BigUint;
use proptest::prelude::*;

use super::*;
use crate::intarith::{Budget, FactorHintCache, Factorizer};

fn data(q: u64, n: u64) -> PairData {
    PairData::new(q, n, &Factorizer::with_builtin_hints()).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    relative_error(a, b) <= 1e-9
}

#[test]
fn s_m_for_published_rows() {
    let p = SieveParams::new(1, 2, FactorSelection::none());
    let (s, m, u, r, _) = sieve_s_m(&data(7, 11), &p).unwrap();
    assert!(close(s.as_f64(), 0.379164614709749));
    assert!(close(m, 23.0990152815921));
    assert_eq!((u, r), (2, 3));
    let (s, m, ..) = sieve_s_m(&data(49, 7), &p).unwrap();
    assert!(close(s.as_f64(), 0.536567753199395));
    assert!(close(m, 20.6369753686705));
}

#[test]
fn trivial_params_give_unit_s_and_m() {
    let (s, m, u, r, sc) = sieve_s_m(&data(7, 11), &SieveParams::trivial()).unwrap();
    assert_eq!(s, Rational::from_integer(1.into()));
    assert_eq!(m, 1.0);
    assert_eq!((u, r, sc), (0, 0, 0));
}

#[test]
fn unsieved_criterion() {
    let rep = unsieved_check(&data(7, 6), 3).unwrap();
    assert_eq!(rep.verdict, Verdict::Fails);
    let rep = unsieved_check(&data(7, 11), 3).unwrap();
    // W(Q) = 4, W(7^11 - 1) = 16, W(x^11 - 1) = 4
    assert_eq!(rep.rhs_log2, 13.0);
    assert_eq!(rep.verdict, Verdict::Fails);
    assert!(unsieved_check(&data(7, 11), 0).is_err());
}

#[test]
fn sieve_with_published_params() {
    let rep = sieve_check(&data(7, 11), 3, &SieveParams::new(1, 2, FactorSelection::none())).unwrap();
    assert_eq!(rep.verdict, Verdict::Holds);
    assert!((2f64.powf(rep.lhs_log2) - 907.49).abs() < 0.1);
    assert!((2f64.powf(rep.rhs_log2) - 8.0 * 2.0 * 23.0990152815921).abs() < 1e-6);

    let g = FactorSelection::from_polynomial(7, 24, "x^6+6").unwrap();
    let rep = sieve_check(&data(7, 24), 3, &SieveParams::new(5, 30, g)).unwrap();
    assert_eq!(rep.verdict, Verdict::Holds);
    assert!(close(rep.s_float, 0.271667188760882));
    assert!(close(rep.m_value, 123.472159190509));
}

#[test]
fn polynomial_selections() {
    let count = |q, n, t| match FactorSelection::from_polynomial(q, n, t).unwrap().resolve(&factor_xn_minus_1(q, n).unwrap()) {
        Ok(m) => m.into_iter().collect::<Vec<_>>(),
        Err(e) => panic!("{e}"),
    };
    assert_eq!(count(7, 15, "x^2+x+1"), vec![(1, 2)]);
    assert_eq!(count(2401, 15, "x+3"), vec![(1, 1)]);
    assert_eq!(count(7, 24, "x^6+6"), vec![(1, 6)]);
    assert_eq!(count(7, 32, "x^16+6"), vec![(1, 2), (2, 7)]);
    assert_eq!(count(49, 48, "(x^48-1)/(x^12-1)"), vec![(1, 36)]);
    assert!(FactorSelection::from_polynomial(7, 11, "x+2").is_err());
    assert!(FactorSelection::from_polynomial(7, 11, "2x-2").is_err());
    assert_eq!(FactorSelection::parse(7, 11, "1:1").unwrap().label(), "1:1");
    assert!(FactorSelection::parse(7, 11, "1:2").unwrap().resolve(&factor_xn_minus_1(7, 11).unwrap()).is_err());
}

#[test]
fn divisor_validation() {
    let d = data(7, 11);
    assert!(sieve_s_m(&d, &SieveParams::new(5, 2, FactorSelection::none())).is_err());
    assert!(sieve_s_m(&d, &SieveParams::new(1123, 6, FactorSelection::none())).is_ok());
    assert!(sieve_s_m(&d, &SieveParams::new(2, 1, FactorSelection::none())).is_err());
}

#[test]
fn search_outcomes() {
    let b = SearchBudget::default();
    assert_eq!(search_params(&data(7, 11), 3, b).unwrap().verdict, Verdict::Holds);
    assert_eq!(search_params(&data(7, 6), 3, b).unwrap().verdict, Verdict::Fails);
    assert_eq!(search_params(&data(7, 9), 3, b).unwrap().verdict, Verdict::Fails);
    let mut seen = 0;
    for n in 30..60 {
        let d = data(7, n);
        if unsieved_check(&d, 3).unwrap().verdict == Verdict::Holds {
            seen += 1;
            assert_eq!(search_params(&d, 3, b).unwrap().verdict, Verdict::Holds);
        }
    }
    assert!(seen > 10);
}

#[test]
fn low_degree_sieve_bounds() {
    let rec = low_degree_sieve(7, 11).unwrap();
    assert_eq!((rec.d, rec.excluded), (10, 1));
    assert!((rec.m - 3.0000000070802666).abs() < 1e-12);
    assert!(rec.bound_ok);
    assert!(low_degree_sieve(7, 6).is_err());
    assert!(low_degree_sieve(7, 36).unwrap().special_case);
    assert!(!rec.special_case);
}

#[test]
fn table1_rows_hold_and_are_tight() {
    assert!(table1_nk_check(3, 10.0, 152).unwrap());
    assert!(!table1_nk_check(3, 10.0, 10).unwrap());
    for k in [41, 58, 75] {
        assert!(table1_nk_check(k, 9.5, 9).unwrap());
    }
    assert!(table1_nk_check(3, 40.0, 152).is_err());
}

#[test]
fn table2_rows_within_bounds() {
    for row in table2_rows().iter().chain([&PART2_TEXT_ROW]) {
        let b = part2_worstcase(row.a, row.b, 0).unwrap();
        assert!(b.within(row).unwrap(), "{row:?} {b:?}");
    }
    let b = part2_worstcase(17, 157, 0).unwrap();
    assert!((b.s_min - 0.02162406187746144).abs() < 1e-15);
    assert!(part2_worstcase(0, 400, 0).is_err());
}

#[test]
fn incomplete_factorization_is_three_valued() {
    // 3^37 - 1 has two primes above the trial bound; with no rho budget they stay unresolved.
    let fz = Factorizer::new(FactorHintCache::empty(), Budget { rho_iterations: 0, time_limit: None });
    let d = PairData::new(3, 37, &fz).unwrap();
    let full = data(3, 37);
    assert!(!d.is_complete() && full.is_complete());
    let exact = unsieved_check(&full, 3).unwrap().verdict;
    let rough = unsieved_check(&d, 3).unwrap().verdict;
    assert!(rough == exact || rough == Verdict::Unknown);
    let p = SieveParams::new(1, 2, FactorSelection::none());
    let exact = sieve_check(&full, 3, &p).unwrap();
    let rough = sieve_check(&d, 3, &p).unwrap();
    assert!(rough.verdict == exact.verdict || rough.verdict == Verdict::Unknown);
    assert!(rough.s_exact <= exact.s_exact);
}

#[test]
fn scan_small_range() {
    let out = scan(&[7], &[6, 7, 11], 3, &Factorizer::with_builtin_hints(), ScanOptions::default()).unwrap();
    assert_eq!(out.exceptions, vec![(7, 6), (7, 7)]);
    let csv = verdicts_csv(&out.reports);
    assert!(csv.starts_with("q,n,m,method,e_prime,e,g,S,M,verdict\n"));
    assert_eq!(csv.lines().count(), 4);
}

fn prime_powers() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 25, 27, 31, 49, 64, 81, 121, 125, 343])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trivial_sieve_matches_unsieved(q in prime_powers(), n in 1u64..24, m in 1u64..12) {
        let d = data(q, n);
        let a = unsieved_check(&d, m).unwrap();
        let b = sieve_check(&d, m, &SieveParams::trivial()).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(a.lhs_log2.to_bits(), b.lhs_log2.to_bits());
        prop_assert_eq!(a.rhs_log2.to_bits(), b.rhs_log2.to_bits());
    }

    #[test]
    fn enlarging_e_weakly_increases_s(q in prime_powers(), n in 2u64..20, cut in 0usize..6) {
        let d = data(q, n);
        let primes = d.order.primes();
        prop_assume!(cut < primes.len());
        let e: BigUint = primes[..cut].iter().product();
        let e2 = &e * &primes[cut];
        let g = FactorSelection::from_counts(BTreeMap::new());
        let (s1, _, _, r1, _) = sieve_s_m(&d, &SieveParams::new(Divisor::Full, Divisor::Value(e), g.clone())).unwrap();
        let (s2, _, _, r2, _) = sieve_s_m(&d, &SieveParams::new(Divisor::Full, Divisor::Value(e2), g)).unwrap();
        prop_assert_eq!(r1, r2 + 1);
        prop_assert!(s2 >= s1);
        prop_assert!(s2 <= Rational::from_integer(1.into()));
    }
}
