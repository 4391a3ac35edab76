use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed};
use serde::Serialize;

use super::{relative_error, sieve_check, FactorSelection, Method, PairData, SieveParams, SieveReport, Verdict};
use crate::error::{Error, Result};
use crate::intarith::{first_primes, ln_c_max, Factorizer};
use crate::scalar::{parse_decimal, Scalar};
use crate::Rational;

/// A published sieve parameter row for `(7^k, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PublishedRow {
    pub table: u8,
    pub k: u32,
    pub n: u64,
    pub e_prime: u64,
    pub e: u64,
    pub g: &'static str,
    pub s: &'static str,
    pub m: &'static str,
}

impl PublishedRow {
    #[must_use]
    pub fn q(&self) -> u64 {
        7u64.pow(self.k)
    }

    pub fn params(&self) -> Result<SieveParams> {
        let g = if self.g == "1" {
            FactorSelection::none()
        } else {
            FactorSelection::from_polynomial(self.q(), self.n, self.g)?
        };
        Ok(SieveParams::new(self.e_prime, self.e, g.with_label(self.g)))
    }
}

const fn row(table: u8, k: u32, n: u64, e_prime: u64, e: u64, g: &'static str, s: &'static str, m: &'static str) -> PublishedRow {
    PublishedRow { table, k, n, e_prime, e, g, s, m }
}

static TABLE3: [PublishedRow; 34] = [
    row(3, 1, 11, 1, 2, "1", "0.379164614709749", "23.0990152815921"),
    row(3, 1, 14, 1, 2, "x+1", "0.291669794015721", "36.2853466665835"),
    row(3, 1, 15, 1, 2, "x^2+x+1", "0.207947594468628", "78.9424625511299"),
    row(3, 1, 16, 1, 6, "x^2+6", "0.194961580806272", "109.713529574153"),
    row(3, 1, 19, 1, 1, "x+6", "0.126907974235963", "135.955333400811"),
    row(3, 1, 20, 1, 2, "x^2+6", "0.0219001519714673", "1006.55923907116"),
    row(3, 1, 24, 5, 30, "x^6+6", "0.271667188760882", "123.472159190509"),
    row(3, 1, 27, 1, 2, "x^2+x+1", "0.186434908720237", "130.731256204889"),
    row(3, 1, 30, 1, 2, "x^6+6", "0.252361603032526", "112.951902601408"),
    row(3, 1, 32, 1, 2, "x^16+6", "0.138344865742225", "146.566261224797"),
    row(3, 1, 36, 1, 6, "x^6+6", "0.0815701713798487", "431.078416876374"),
    row(3, 1, 48, 5, 30, "x^24+6", "0.0315593546237637", "1427.88467148551"),
    row(3, 2, 9, 1, 2, "1", "0.336456330954422", "61.4430782243456"),
    row(3, 2, 10, 1, 2, "x+1", "0.0219001519714673", "1006.55923907116"),
    row(3, 2, 12, 5, 30, "x+1", "0.190034535699657", "196.701451837560"),
    row(3, 2, 15, 1, 2, "1", "0.129912623440689", "263.714366930035"),
    row(3, 2, 16, 5, 30, "x+1", "0.262765246139282", "150.421454408501"),
    row(3, 2, 18, 1, 6, "x+1", "0.0232271340399648", "1508.85831234188"),
    row(3, 2, 20, 1, 2, "x^4+6", "0.00893876673760447", "3805.65670098153"),
    row(3, 2, 24, 902_785, 5_416_710, "x+1", "0.0058477612584259", "10091.3311803707"),
    row(3, 2, 30, 55, 330, "x+1", "0.353135978712364", "169.074451646448"),
    row(3, 2, 48, 5, 30, "(x^48-1)/(x^12-1)", "0.00527505642356318", "10428.4287590025"),
    row(3, 3, 8, 1, 6, "1", "0.279932899745072", "94.8794008266895"),
    row(3, 3, 9, 1, 2, "1", "0.483964545975008", "66.0542788884391"),
    row(3, 3, 10, 1, 2, "1", "0.298329291645090", "79.0960165298223"),
    row(3, 3, 12, 1, 6, "1", "0.244971922619374", "140.791415915968"),
    row(3, 3, 18, 1, 114, "x+1", "0.776753550747086", "67.6578910401477"),
    row(3, 4, 8, 1, 2, "1", "0.335012920719318", "82.5939064738975"),
    row(3, 4, 9, 1, 2, "1", "0.0915444731815404", "296.938613568257"),
    row(3, 4, 10, 1, 2, "1", "0.207272794226151", "180.508714267778"),
    row(3, 4, 12, 1, 30, "x+1", "0.512192424178116", "85.9528231386856"),
    row(3, 4, 15, 1, 30, "x+3", "0.373733457035790", "149.163704411760"),
    row(3, 5, 8, 1, 2, "1", "0.0157216548212150", "1719.37646622071"),
    row(3, 6, 8, 1, 6, "1", "0.197106668135930", "189.715617893169"),
];

static TABLE6: [PublishedRow; 23] = [
    row(6, 4, 6, 1, 6, "1", "0.434016210002031", "66.5137194296705"),
    row(6, 5, 6, 1, 2, "1", "0.257002547699352", "107.057324301646"),
    row(6, 6, 6, 1, 6, "1", "0.303162160154874", "91.0612469122359"),
    row(6, 7, 6, 1, 2, "1", "0.460243100976110", "62.8374138376349"),
    row(6, 8, 6, 1, 6, "1", "0.322185830859915", "104.425360891641"),
    row(6, 9, 6, 1, 1, "1", "0.0178814663260537", "1679.71476080177"),
    row(6, 10, 6, 1, 6, "1", "0.0818969304893583", "465.997854045796"),
    row(6, 11, 6, 1, 2, "1", "0.396638261656470", "82.6780462035085"),
    row(6, 12, 6, 1, 2, "1", "0.208001805090034", "189.498372829595"),
    row(6, 13, 6, 1, 2, "1", "0.451835063251708", "75.0355005264751"),
    row(6, 14, 6, 1, 6, "1", "0.238642380092351", "148.662969026941"),
    row(6, 15, 6, 1, 2, "1", "0.282943029313370", "150.439776381568"),
    row(6, 16, 6, 1, 2, "1", "0.0213997081969370", "1964.64358436493"),
    row(6, 2, 7, 1, 2, "1", "0.536567753199395", "20.6369753686705"),
    row(6, 3, 7, 1, 1, "1", "0.0388161015503813", "259.625047353622"),
    row(6, 4, 7, 1, 2, "1", "0.376551093326836", "36.5238673592599"),
    row(6, 5, 7, 1, 1, "1", "0.0968025701017207", "125.963650834790"),
    row(6, 6, 7, 1, 1, "1", "0.00143402424023756", "13251.4273575547"),
    row(6, 7, 7, 1, 1, "1", "0.131401454426554", "100.933455925073"),
    row(6, 8, 7, 1, 2, "1", "0.369673098692035", "61.5120393608290"),
    row(6, 9, 7, 1, 1, "1", "0.0166791949792349", "841.369047332896"),
    row(6, 10, 7, 1, 2, "1", "0.447962587202473", "57.8082320135819"),
    row(6, 11, 7, 1, 1, "1", "0.0963847008090025", "157.626358479073"),
];

#[must_use]
pub fn table3_rows() -> &'static [PublishedRow] {
    &TABLE3
}

#[must_use]
pub fn table6_rows() -> &'static [PublishedRow] {
    &TABLE6
}

/// Published parameters for `(q, n)`, if any.
#[must_use]
pub fn published_params(q: u64, n: u64) -> Option<&'static PublishedRow> {
    TABLE3.iter().chain(TABLE6.iter()).find(|r| r.q() == q && r.n == n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Match,
    Mismatch,
    Unknown,
}

/// A published row recomputed.
#[derive(Debug, Clone, Serialize)]
pub struct RowCheck {
    pub row: PublishedRow,
    pub report: SieveReport,
    pub s_rel_err: f64,
    pub m_rel_err: f64,
    pub status: RowStatus,
}

/// Tolerance on the relative error of recomputed `S` and `M`.
pub const ROW_TOLERANCE: f64 = 1e-9;

/// Recomputes `S`, `M` and the verdict of a published row for the given `m`.
pub fn check_published_row(row: &PublishedRow, m: u64, factorizer: &Factorizer) -> Result<RowCheck> {
    let data = PairData::new(row.q(), row.n, factorizer)?;
    let mut report = sieve_check(&data, m, &row.params()?)?;
    report.method = Method::Published;
    let s_pub: f64 = row.s.parse().map_err(|_| Error::InvalidArgument(row.s.into()))?;
    let m_pub: f64 = row.m.parse().map_err(|_| Error::InvalidArgument(row.m.into()))?;
    let s_rel_err = relative_error(report.s_float, s_pub);
    let m_rel_err = relative_error(report.m_value, m_pub);
    let status = if !data.is_complete() {
        RowStatus::Unknown
    } else if s_rel_err <= ROW_TOLERANCE && m_rel_err <= ROW_TOLERANCE && report.verdict == Verdict::Holds {
        RowStatus::Match
    } else {
        RowStatus::Mismatch
    };
    Ok(RowCheck { row: *row, report, s_rel_err, m_rel_err, status })
}

/// A row `(r, k-range, n_k)` of the threshold table for `q = 7^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub r: f64,
    pub ks: RangeInclusive<u32>,
    pub n_k: u64,
}

#[must_use]
pub fn table1_rows() -> Vec<Table1Row> {
    let rows: [(f64, u32, u32, u64); 16] = [
        (10.0, 3, 3, 152),
        (9.0, 4, 4, 57),
        (8.5, 5, 5, 36),
        (8.5, 6, 6, 28),
        (8.5, 7, 7, 23),
        (8.5, 8, 8, 20),
        (8.5, 9, 9, 18),
        (9.0, 10, 10, 17),
        (9.0, 11, 11, 16),
        (9.0, 12, 12, 15),
        (9.0, 13, 14, 14),
        (9.0, 15, 17, 13),
        (9.0, 18, 21, 12),
        (9.0, 22, 27, 11),
        (9.0, 28, 40, 10),
        (9.5, 41, 75, 9),
    ];
    rows.iter().map(|&(r, a, b, n_k)| Table1Row { r, ks: a..=b, n_k }).collect()
}

/// Whether `q^{n/2-2} > 8 C^2 q^{2n/r} 2^{2n}` holds for `q = 7^k`, `C = c_max(r)` and every
/// `n` in `[n_k, n_k + 200]`.
pub fn table1_nk_check(k: u32, r: f64, n_k: u64) -> Result<bool> {
    let ln_c = ln_c_max(r)?;
    let ln_q = f64::from(k) * 7f64.ln();
    let ln2 = std::f64::consts::LN_2;
    Ok((n_k..=n_k + 200).all(|n| {
        let n = n as f64;
        (n / 2.0 - 2.0) * ln_q > 3.0 * ln2 + 2.0 * ln_c + (2.0 * n / r) * ln_q + 2.0 * n * ln2
    }))
}

/// Published worst-case bounds for a range `a <= omega(q^n - 1) <= b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Table2Row {
    pub a: usize,
    pub b: usize,
    pub s_min: &'static str,
    pub m_max: &'static str,
    pub rhs_max: &'static str,
}

static TABLE2: [Table2Row; 3] = [
    Table2Row { a: 17, b: 157, s_min: "0.02162406", m_max: "12904.293824", rhs_max: "2.90579e19" },
    Table2Row { a: 10, b: 60, s_min: "0.0550598", m_max: "1800.044933", rhs_max: "2.47397e14" },
    Table2Row { a: 8, b: 47, s_min: "0.00340868", m_max: "22591.376714", rhs_max: "1.94059e14" },
];

/// The large-omega case stated alongside the table.
pub static PART2_TEXT_ROW: Table2Row =
    Table2Row { a: 88, b: 2827, s_min: "0.0044306", m_max: "1.24e6", rhs_max: "1.5518994e64" };

#[must_use]
pub fn table2_rows() -> &'static [Table2Row] {
    &TABLE2
}

/// Worst case of the sieve when the `a` smallest primes are kept in `e` and `e'`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Part2Bounds {
    #[serde(skip)]
    pub s_exact: Rational,
    pub s_min: f64,
    #[serde(skip)]
    pub m_exact: Rational,
    pub m_max: f64,
    #[serde(skip)]
    pub rhs_exact: Rational,
    pub rhs_max: f64,
}

impl Part2Bounds {
    /// Exact comparison against published `S >`, `M <` and `RHS <` bounds.
    pub fn within(&self, row: &Table2Row) -> Result<bool> {
        Ok(self.s_exact > parse_decimal(row.s_min)?
            && self.m_exact < parse_decimal(row.m_max)?
            && self.rhs_exact < parse_decimal(row.rhs_max)?)
    }
}

/// `sum 1/p` as an unreduced fraction, summed pairwise.
fn reciprocal_sum(ps: &[u64]) -> (BigInt, BigInt) {
    match ps {
        [] => (BigInt::from(0), BigInt::one()),
        [p] => (BigInt::one(), BigInt::from(*p)),
        _ => {
            let (l, r) = ps.split_at(ps.len() / 2);
            let ((ln, ld), (rn, rd)) = (reciprocal_sum(l), reciprocal_sum(r));
            (ln * &rd + rn * &ld, ld * rd)
        }
    }
}

/// `S = 1 - 2 sum_{i=a+1}^{b} 1/p_i`, `M = (2(b-a) + 2s - 1)/S + 2`,
/// `RHS = 8 M 2^{2a} 2^{14}` with `W(g) = 2^7`.
pub fn part2_worstcase(a: usize, b: usize, s: u64) -> Result<Part2Bounds> {
    if a > b || b == 0 {
        return Err(Error::InvalidArgument(format!("need a <= b, got a={a}, b={b}")));
    }
    let primes = first_primes(b);
    let (num, den) = reciprocal_sum(&primes[a..]);
    let tail = Rational::new(num, den);
    let s_exact = Rational::one() - tail * Rational::from_integer(BigInt::from(2));
    if !s_exact.is_positive() {
        return Err(Error::PrecheckFailed(format!("S <= 0 for a={a}, b={b}")));
    }
    let count = 2 * (b - a) as i64 + 2 * s as i64 - 1;
    let m_exact = Rational::from_integer(BigInt::from(count)) / &s_exact + Rational::from_integer(BigInt::from(2));
    let w: BigInt = Pow::pow(BigInt::from(2), 2 * a + 14);
    let rhs_exact = &m_exact * Rational::from_integer(w * 8);
    Ok(Part2Bounds {
        s_min: s_exact.as_f64(),
        m_max: m_exact.as_f64(),
        rhs_max: rhs_exact.as_f64(),
        s_exact,
        m_exact,
        rhs_exact,
    })
}
