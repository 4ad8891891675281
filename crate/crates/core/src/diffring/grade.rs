//! The two gradings: polynomial degree (z-jets 1, u-jets 1/2, x 0) and
//! differential weight (jet order; x counts -1).

use crate::algebra::{Monomial, Poly, Rational};

use super::{Base, DiffExpr, JetVariable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Grade {
    /// The zero expression, homogeneous of every grade.
    Zero,
    Homogeneous(Rational),
    NonHomogeneous,
}

impl Grade {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Grade::Homogeneous(v) => Some(v),
            _ => None,
        }
    }
}

fn monomial_grade(m: &Monomial, var_grade: fn(Option<JetVariable>) -> Rational) -> Rational {
    m.factors()
        .map(|(v, e)| var_grade(JetVariable::from_index(v)) * Rational::from(e as u32))
        .sum()
}

fn poly_grade(p: &Poly, var_grade: fn(Option<JetVariable>) -> Rational) -> Grade {
    let mut grade: Option<Rational> = None;
    for (m, _) in p.terms() {
        let g = monomial_grade(m, var_grade);
        match &grade {
            None => grade = Some(g),
            Some(h) if *h != g => return Grade::NonHomogeneous,
            _ => {}
        }
    }
    grade.map_or(Grade::Zero, Grade::Homogeneous)
}

fn expr_grade(e: &DiffExpr, var_grade: fn(Option<JetVariable>) -> Rational) -> Grade {
    let mut g = match poly_grade(e.numerator(), var_grade) {
        Grade::Homogeneous(g) => g,
        other => return other,
    };
    for (f, k) in e.denominator_factors() {
        match poly_grade(f, var_grade) {
            Grade::Homogeneous(h) => g = g - h * Rational::from(*k),
            _ => return Grade::NonHomogeneous,
        }
    }
    Grade::Homogeneous(g)
}

fn degree_of(v: Option<JetVariable>) -> Rational {
    match v {
        None => Rational::zero(),
        Some(JetVariable { base: Base::Z, .. }) => Rational::one(),
        Some(JetVariable { base: Base::U, .. }) => Rational::new(1, 2),
    }
}

fn weight_of(v: Option<JetVariable>) -> Rational {
    match v {
        None => Rational::from_integer(-1),
        Some(j) => Rational::from(j.order),
    }
}

pub fn poly_degree(e: &DiffExpr) -> Grade {
    expr_grade(e, degree_of)
}

pub fn diff_weight(e: &DiffExpr) -> Grade {
    expr_grade(e, weight_of)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;
    use crate::diffring::parse_expr;

    fn h(n: i64, d: i64) -> Grade {
        Grade::Homogeneous(q(n, d))
    }

    #[test]
    fn degrees() {
        assert_eq!(poly_degree(&parse_expr("z'*u''").unwrap()), h(3, 2));
        assert_eq!(poly_degree(&parse_expr("(z')^2/z").unwrap()), h(1, 1));
        assert_eq!(poly_degree(&parse_expr("z + u").unwrap()), Grade::NonHomogeneous);
        assert_eq!(poly_degree(&DiffExpr::zero()), Grade::Zero);
    }

    #[test]
    fn weights() {
        assert_eq!(diff_weight(&parse_expr("u''*z'").unwrap()), h(3, 1));
        assert_eq!(diff_weight(&parse_expr("z").unwrap()), h(0, 1));
        assert_eq!(diff_weight(&DiffExpr::discriminant()), h(2, 1));
        assert_eq!(diff_weight(&DiffExpr::x()), h(-1, 1));
    }

    #[test]
    fn derivative_raises_weight_and_keeps_degree() {
        let e = parse_expr("z*u'/((z')^2 - z*(u')^2)").unwrap();
        assert_eq!(diff_weight(&e), h(-1, 1));
        assert_eq!(diff_weight(&e.d_x()), h(0, 1));
        assert_eq!(poly_degree(&e.d_x()), poly_degree(&e));
    }
}
