use prenorm::intarith::Factorizer;
use prenorm::sieve::{check_published_row, table3_rows, table6_rows, RowStatus};

#[test]
fn every_published_row_recomputes() {
    let fz = Factorizer::with_builtin_hints();
    for row in table3_rows().iter().chain(table6_rows()) {
        let c = check_published_row(row, 3, &fz).unwrap();
        assert_eq!(
            c.status,
            RowStatus::Match,
            "(7^{}, {}): S err {:e}, M err {:e}, verdict {:?}",
            row.k,
            row.n,
            c.s_rel_err,
            c.m_rel_err,
            c.report.verdict
        );
    }
}
