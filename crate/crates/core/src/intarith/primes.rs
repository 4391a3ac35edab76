use std::sync::OnceLock;

/// Trial-division bound used by the factorizer.
pub const TRIAL_LIMIT: u64 = 1_000_000;

/// All primes `<= limit`.
#[must_use]
pub fn primes_upto(limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_prime_upto(limit, |p| out.push(p));
    out
}

/// Primes below [`TRIAL_LIMIT`], computed once.
pub fn trial_primes() -> &'static [u64] {
    static CELL: OnceLock<Vec<u64>> = OnceLock::new();
    CELL.get_or_init(|| primes_upto(TRIAL_LIMIT))
}

/// The first `count` primes.
#[must_use]
pub fn first_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    let n = count as f64;
    let mut bound = if count < 6 { 15.0 } else { n * (n.ln() + n.ln().ln()) + 10.0 };
    loop {
        let ps = primes_upto(bound as u64);
        if ps.len() >= count {
            return ps[..count].to_vec();
        }
        bound *= 1.5;
    }
}

/// Segmented sieve of Eratosthenes; calls `f` for each prime `<= limit` in order.
pub fn for_each_prime_upto(limit: u64, mut f: impl FnMut(u64)) {
    if limit < 2 {
        return;
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let mut small = vec![true; (root + 1) as usize];
    small[0] = false;
    small[1] = false;
    let mut i = 2;
    while i * i <= root {
        if small[i as usize] {
            let mut j = i * i;
            while j <= root {
                small[j as usize] = false;
                j += i;
            }
        }
        i += 1;
    }
    let base: Vec<u64> = (2..=root).filter(|&k| small[k as usize]).collect();

    const SEG: u64 = 1 << 18;
    let mut lo = 2u64;
    let mut seg = vec![true; SEG as usize];
    while lo <= limit {
        let hi = (lo + SEG - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        seg[..len].iter_mut().for_each(|b| *b = true);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let start = (p * p).max(lo.div_ceil(p) * p);
            let mut j = start;
            while j <= hi {
                seg[(j - lo) as usize] = false;
                j += p;
            }
        }
        for (off, &is_p) in seg[..len].iter().enumerate() {
            if is_p {
                f(lo + off as u64);
            }
        }
        lo = hi + 1;
    }
}
