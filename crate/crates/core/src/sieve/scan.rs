use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{published_params, search_params, unsieved_check, sieve_check, Method, PairData, SearchBudget, SieveReport, Verdict};
use crate::error::Result;
use crate::intarith::Factorizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScanOptions {
    /// Try the published parameter rows before searching.
    pub use_published: bool,
    pub search: SearchBudget,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanOutcome {
    /// One report per pair, sorted by `(q, n)`.
    pub reports: Vec<SieveReport>,
    /// Pairs whose verdict is not `holds`, sorted.
    pub exceptions: Vec<(u64, u64)>,
}

fn evaluate(q: u64, n: u64, m: u64, factorizer: &Factorizer, opts: &ScanOptions) -> Result<SieveReport> {
    let data = PairData::new(q, n, factorizer)?;
    let first = unsieved_check(&data, m)?;
    if first.verdict == Verdict::Holds {
        return Ok(first);
    }
    let mut fallback = first;
    if opts.use_published {
        if let Some(row) = published_params(q, n) {
            let mut rep = sieve_check(&data, m, &row.params()?)?;
            rep.method = Method::Published;
            if rep.verdict == Verdict::Holds {
                return Ok(rep);
            }
        }
    }
    let found = search_params(&data, m, opts.search)?;
    if found.verdict != Verdict::Fails || fallback.verdict == Verdict::Fails {
        fallback = found;
    }
    Ok(fallback)
}

/// Evaluates every pair: the unsieved criterion, then published rows (optional), then the search.
pub fn scan(qs: &[u64], ns: &[u64], m: u64, factorizer: &Factorizer, opts: ScanOptions) -> Result<ScanOutcome> {
    let mut pairs: Vec<(u64, u64)> = qs.iter().flat_map(|&q| ns.iter().map(move |&n| (q, n))).collect();
    pairs.sort_unstable();
    pairs.dedup();
    let reports = pairs
        .par_iter()
        .map(|&(q, n)| evaluate(q, n, m, factorizer, &opts))
        .collect::<Result<Vec<_>>>()?;
    let exceptions = reports.iter().filter(|r| r.verdict != Verdict::Holds).map(|r| (r.q, r.n)).collect();
    Ok(ScanOutcome { reports, exceptions })
}

/// CSV with columns `q,n,m,method,e_prime,e,g,S,M,verdict`.
#[must_use]
pub fn verdicts_csv(reports: &[SieveReport]) -> String {
    let mut out = String::from("q,n,m,method,e_prime,e,g,S,M,verdict\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},\"{}\",{},{},{}",
            r.q,
            r.n,
            r.m,
            r.method.as_str(),
            r.params.e_prime_label(),
            r.params.e_label(),
            r.params.g.label(),
            r.s_float,
            r.m_value,
            r.verdict.as_str()
        );
    }
    out
}
