use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::params::product;
use super::{sieve_check, Divisor, FactorSelection, PairData, SieveParams, SieveReport};
use crate::error::Result;
use crate::intarith::TRIAL_LIMIT;

/// Limits of the parameter search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Candidate `e'` and `e` use at most this many of the smallest primes.
    pub max_primes: usize,
    /// Cap on the number of `g` candidates.
    pub max_g_candidates: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { max_primes: 20, max_g_candidates: 1 << 12 }
    }
}

/// Inclusion counts tried for a degree class with `c` factors.
fn options(c: u64) -> Vec<u64> {
    if c <= 8 {
        return (0..=c).collect();
    }
    let mut v = vec![0];
    let mut k = 1;
    while k < c {
        v.push(k);
        k *= 2;
    }
    v.push(c);
    v
}

struct GCandidate {
    counts: Vec<u64>,
    poly_sum: f64,
    excluded: u64,
    included: u64,
}

fn g_candidates(q: u64, classes: &[(u64, u64)], cap: usize) -> Vec<GCandidate> {
    let opts: Vec<Vec<u64>> = classes.iter().map(|&(_, c)| options(c)).collect();
    let mut keep = 0;
    let mut total = 1usize;
    for o in &opts {
        if total.saturating_mul(o.len()) > cap {
            break;
        }
        total *= o.len();
        keep += 1;
    }
    let weight: Vec<f64> = classes.iter().map(|&(d, _)| (q as f64).powf(-(d as f64))).collect();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; keep];
    loop {
        let mut counts = vec![0u64; classes.len()];
        for (i, &j) in idx.iter().enumerate() {
            counts[i] = opts[i][j];
        }
        let (mut poly_sum, mut excluded, mut included) = (0.0, 0, 0);
        for (i, &(_, c)) in classes.iter().enumerate() {
            excluded += c - counts[i];
            included += counts[i];
            poly_sum += (c - counts[i]) as f64 * weight[i];
        }
        out.push(GCandidate { counts, poly_sum, excluded, included });
        let mut i = 0;
        loop {
            if i == keep {
                return out;
            }
            idx[i] += 1;
            if idx[i] < opts[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

fn reciprocal_tails(ps: &[BigUint]) -> Vec<f64> {
    let mut tails = vec![0.0; ps.len() + 1];
    for i in (0..ps.len()).rev() {
        tails[i] = tails[i + 1] + 1.0 / ps[i].to_f64().unwrap_or(f64::INFINITY);
    }
    tails
}

/// Searches `e'`, `e` over products of the smallest primes and `g` over per-degree inclusion counts.
///
/// Candidates are ranked by `rhs - lhs` at the pessimistic end of the unknown-prime range;
/// the winner is re-evaluated exactly by [`sieve_check`].
pub fn search_params(data: &PairData, m: u64, budget: SearchBudget) -> Result<SieveReport> {
    let qp: Vec<BigUint> = data.q_part.primes();
    let op: Vec<BigUint> = data.order.primes();
    let classes = data.xn.distinct_factors();
    let gs = g_candidates(data.q, &classes, budget.max_g_candidates);
    let (tail_q, tail_o) = (reciprocal_tails(&qp), reciprocal_tails(&op));
    let k = data.unknown.1;
    let unknown_sum = f64::from(2 * k) / TRIAL_LIMIT as f64;
    let lhs = data.lhs_log2();
    let c = ((2 * m + 2) as f64).log2();
    let mut best: Option<(f64, usize, usize, usize)> = None;
    for jp in 0..=qp.len().min(budget.max_primes) {
        for j in 0..=op.len().min(budget.max_primes) {
            let base = 1.0 - tail_q[jp] - tail_o[j] - unknown_sum;
            let count = (qp.len() - jp + op.len() - j) as u64 + u64::from(2 * k);
            for (gi, g) in gs.iter().enumerate() {
                let s = base - 2.0 * g.poly_sum;
                if s <= 0.0 {
                    continue;
                }
                let mv = (count as f64 + 2.0 * g.excluded as f64 - 1.0) / s + 2.0;
                let rhs = c + (jp + j) as f64 + 2.0 * g.included as f64 + mv.log2();
                let gap = rhs - lhs;
                if best.map_or(true, |b| gap < b.0) {
                    best = Some((gap, jp, j, gi));
                }
            }
        }
    }
    let params = match best {
        None => SieveParams::trivial(),
        Some((_, jp, j, gi)) => {
            let counts: BTreeMap<u64, u64> =
                classes.iter().zip(&gs[gi].counts).map(|(&(d, _), &c)| (d, c)).collect();
            SieveParams {
                e_prime: Divisor::Value(product(&qp[..jp])),
                e: Divisor::Value(product(&op[..j])),
                g: FactorSelection::from_counts(counts),
            }
        }
    };
    sieve_check(data, m, &params)
}
