use prenorm::intarith::Factorizer;
use prenorm::sieve::{scan, ScanOptions, Verdict};

fn exceptions(use_published: bool) -> Vec<(u64, u64)> {
    let ns: Vec<u64> = (6..=48).collect();
    let opts = ScanOptions { use_published, ..ScanOptions::default() };
    let out = scan(&[7, 49, 343], &ns, 3, &Factorizer::with_builtin_hints(), opts).unwrap();
    assert!(out.reports.iter().all(|r| r.verdict != Verdict::Unknown));
    out.exceptions
}

fn expected() -> Vec<(u64, u64)> {
    let mut v = vec![(7, 6), (49, 6), (343, 6), (7, 7), (7, 8), (49, 8), (7, 9), (7, 10), (7, 12), (7, 18)];
    v.sort_unstable();
    v
}

#[test]
fn with_published_rows() {
    assert_eq!(exceptions(true), expected());
}

#[test]
fn search_alone() {
    assert_eq!(exceptions(false), expected());
}
