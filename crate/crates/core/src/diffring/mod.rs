//! Differential polynomial ring in `x`, `u`, `z` and their `x`-derivatives,
//! rational functions over it, and logarithmic closed forms.

mod expr;
mod grade;
mod log;
mod parse;

use std::fmt;

use crate::algebra::{Monomial, Poly, Rational, MAX_VARS};

pub use expr::DiffExpr;
pub use grade::{diff_weight, poly_degree, Grade};
pub use log::LogCombo;
pub use parse::{parse_expr, parse_log_combo, ParseError};

/// Variable slot of `x` inside a [`Monomial`].
pub const X: usize = 0;

/// Highest jet order that fits in a monomial.
pub const MAX_ORDER: u32 = (MAX_VARS as u32 - 3) / 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    U,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVariable {
    pub base: Base,
    pub order: u32,
}

impl JetVariable {
    pub fn u(order: u32) -> Self {
        JetVariable { base: Base::U, order }
    }

    pub fn z(order: u32) -> Self {
        JetVariable { base: Base::Z, order }
    }

    pub fn index(&self) -> usize {
        assert!(self.order <= MAX_ORDER, "jet order {} too high", self.order);
        match self.base {
            Base::U => 1 + 2 * self.order as usize,
            Base::Z => 2 + 2 * self.order as usize,
        }
    }

    /// `None` for the `x` slot.
    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => None,
            i if i % 2 == 1 => Some(Self::u((i as u32 - 1) / 2)),
            i => Some(Self::z((i as u32 - 2) / 2)),
        }
    }

    pub fn derivative(&self) -> Self {
        JetVariable { base: self.base, order: self.order + 1 }
    }
}

/// How the two jet families are spelled when printing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Names {
    /// `u`, `z`: the continuum recurrence coefficients.
    UZ,
    /// `s`, `r`: the shifted-coefficient atoms used for string polynomials.
    SR,
}

impl Names {
    fn letter(self, base: Base) -> char {
        match (self, base) {
            (Names::UZ, Base::U) => 'u',
            (Names::UZ, Base::Z) => 'z',
            (Names::SR, Base::U) => 's',
            (Names::SR, Base::Z) => 'r',
        }
    }
}

pub(crate) fn jet_name(v: JetVariable, names: Names) -> String {
    let c = names.letter(v.base);
    match v.order {
        0 => c.to_string(),
        k @ 1..=3 => format!("{c}{}", "'".repeat(k as usize)),
        k => format!("{c}^({k})"),
    }
}

pub(crate) fn var_name(i: usize, names: Names) -> String {
    match JetVariable::from_index(i) {
        None => "x".to_string(),
        Some(v) => jet_name(v, names),
    }
}

/// `d/dx` on a polynomial: `x' = 1`, `u^(k)' = u^(k+1)`, `z^(k)' = z^(k+1)`.
pub fn d_poly(p: &Poly) -> Poly {
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        for (v, e) in m.factors() {
            let mut nm = *m;
            nm.set_exp(v, e - 1);
            if let Some(jet) = JetVariable::from_index(v) {
                let w = jet.derivative().index();
                nm.set_exp(w, nm.exp(w) + 1);
            }
            terms.push((nm, c * &Rational::from_integer(e as i64)));
        }
    }
    Poly::from_terms(terms)
}

/// Polynomial for a single jet variable.
pub fn jet(v: JetVariable) -> Poly {
    Poly::var(v.index())
}

/// `D = (z')^2 - z (u')^2`.
pub fn discriminant_poly() -> Poly {
    let zp = jet(JetVariable::z(1));
    let up = jet(JetVariable::u(1));
    zp.mul(&zp).sub(&jet(JetVariable::z(0)).mul(&up).mul(&up))
}

pub(crate) fn monomial_text(m: &Monomial, names: Names) -> String {
    let mut parts = Vec::new();
    for (v, e) in ordered_factors(m) {
        let name = var_name(v, names);
        let wrapped = if name.len() > 1 { format!("({name})") } else { name };
        if e == 1 {
            parts.push(var_name(v, names));
        } else {
            parts.push(format!("{wrapped}^{e}"));
        }
    }
    parts.join("*")
}

/// Factors ordered x first, then u-jets by order, then z-jets by order.
fn ordered_factors(m: &Monomial) -> Vec<(usize, u8)> {
    let mut f: Vec<(usize, u8)> = m.factors().collect();
    f.sort_by_key(|(v, _)| var_sort_key(*v));
    f
}

fn var_sort_key(v: usize) -> (u8, u32) {
    match JetVariable::from_index(v) {
        None => (0, 0),
        Some(JetVariable { base: Base::U, order }) => (1, order),
        Some(JetVariable { base: Base::Z, order }) => (2, order),
    }
}

/// Term order for printing: descending total degree, then by variable keys.
pub(crate) fn print_order(p: &Poly) -> Vec<(Monomial, Rational)> {
    let mut terms = p.terms().to_vec();
    terms.sort_by(|(a, _), (b, _)| {
        let ka: Vec<_> = ordered_factors(a).into_iter().map(|(v, e)| (var_sort_key(v), e)).collect();
        let kb: Vec<_> = ordered_factors(b).into_iter().map(|(v, e)| (var_sort_key(v), e)).collect();
        b.total_degree().cmp(&a.total_degree()).then_with(|| kb.cmp(&ka))
    });
    terms
}

pub(crate) fn poly_text(p: &Poly, names: Names) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in print_order(p).iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if m.is_one() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&monomial_text(m, names));
        } else {
            out.push_str(&format!("{a}*{}", monomial_text(m, names)));
        }
    }
    out
}

/// Wrapper printing a polynomial with the chosen variable names.
pub struct PolyDisplay<'a>(pub &'a Poly, pub Names);

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", poly_text(self.0, self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_indexing_roundtrips() {
        for order in 0..=MAX_ORDER {
            for v in [JetVariable::u(order), JetVariable::z(order)] {
                assert_eq!(JetVariable::from_index(v.index()), Some(v));
            }
        }
        assert_eq!(JetVariable::from_index(X), None);
    }

    #[test]
    fn names() {
        assert_eq!(jet_name(JetVariable::u(2), Names::UZ), "u''");
        assert_eq!(jet_name(JetVariable::z(4), Names::UZ), "z^(4)");
        assert_eq!(jet_name(JetVariable::z(1), Names::SR), "r'");
    }

    #[test]
    fn derivative_of_discriminant() {
        let d = discriminant_poly();
        let expected = crate::diffring::parse_expr("2*z'*z'' - z'*(u')^2 - 2*z*u'*u''").unwrap();
        assert_eq!(DiffExpr::from_poly(d_poly(&d)), expected);
    }
}
