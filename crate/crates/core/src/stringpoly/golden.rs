//! Reference string operators for `|lambda| + |eta| <= 3`, transcribed from
//! the published table. Terms are `(r_half, ds, dr, numerator, denominator)`.

use crate::algebra::Rational;

use super::operator::{OpKey, OperatorPoly};
use super::Partition;

type Terms = &'static [(i32, u32, u32, i64, i64)];

const ROWS: &[(&str, &str, Terms, Terms)] = &[
    ("", "", &[(0, 0, 0, 1, 1)], &[]),
    ("1", "", &[], &[(2, 0, 1, -1, 2)]),
    ("", "1", &[(0, 0, 1, 1, 2)], &[]),
    ("2", "", &[(2, 1, 1, 1, 6)], &[(2, 2, 0, 1, 6), (2, 0, 1, 1, 12)]),
    ("1+1", "", &[(2, 2, 1, 1, 12)], &[(2, 3, 0, 1, 12), (2, 1, 1, 1, 12)]),
    ("1", "1", &[(0, 3, 0, 1, 6)], &[(2, 2, 1, 1, 6)]),
    ("", "2", &[(0, 2, 0, 1, 6), (0, 0, 1, 1, 12)], &[(2, 1, 1, 1, 6)]),
    (
        "",
        "1+1",
        &[(-2, 2, 0, 1, 12), (-2, 0, 1, -1, 12), (0, 2, 1, 1, 12)],
        &[(0, 3, 0, 1, 12), (0, 1, 1, -1, 12)],
    ),
    ("3", "", &[], &[(2, 2, 0, -1, 12)]),
    ("2+1", "", &[], &[(2, 3, 0, -1, 6)]),
    ("1+1+1", "", &[], &[(2, 4, 0, -1, 24)]),
    ("2", "1", &[(0, 3, 0, 1, 12)], &[(2, 2, 1, -1, 12)]),
    ("1+1", "1", &[(0, 4, 0, 1, 24)], &[(2, 3, 1, -1, 12)]),
    ("1", "2", &[(0, 3, 0, 1, 12)], &[(2, 2, 1, -1, 12)]),
    ("1", "1+1", &[(0, 3, 1, 1, 12)], &[(0, 4, 0, -1, 24), (0, 2, 1, 1, 24)]),
    ("", "3", &[(0, 2, 0, 1, 12)], &[]),
    ("", "2+1", &[(0, 2, 1, 1, 6)], &[]),
    ("", "1+1+1", &[(-2, 4, 0, 1, 24), (-2, 2, 1, -1, 24)], &[]),
];

fn op(terms: Terms) -> OperatorPoly {
    OperatorPoly::from_terms(
        terms.iter().map(|&(r_half, ds, dr, n, d)| (OpKey { r_half, ds, dr }, Rational::new(n, d))),
    )
}

/// `(lambda, eta, P(a), P(b))` for every printed row.
pub fn golden_table() -> Vec<(Partition, Partition, OperatorPoly, OperatorPoly)> {
    ROWS.iter()
        .map(|(l, e, a, b)| (Partition::parse(l).unwrap(), Partition::parse(e).unwrap(), op(a), op(b)))
        .collect()
}
