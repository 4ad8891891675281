//! Rational expressions plus rational multiples of logarithms.

use std::fmt;

use crate::algebra::Rational;

use super::{DiffExpr, Names};

#[derive(Clone, Debug, PartialEq)]
pub struct LogCombo {
    rational: DiffExpr,
    logs: Vec<(Rational, DiffExpr)>,
}

impl LogCombo {
    pub fn zero() -> Self {
        LogCombo { rational: DiffExpr::zero(), logs: Vec::new() }
    }

    pub fn from_expr(e: DiffExpr) -> Self {
        LogCombo { rational: e, logs: Vec::new() }
    }

    /// `c * log(arg)`; `None` if `arg` is constant.
    pub fn log(c: Rational, arg: DiffExpr) -> Option<Self> {
        if arg.constant_value().is_some() {
            return None;
        }
        let mut out = Self::zero();
        out.push_log(c, arg);
        Some(out)
    }

    fn push_log(&mut self, c: Rational, arg: DiffExpr) {
        if c.is_zero() {
            return;
        }
        match self.logs.iter().position(|(_, a)| *a == arg) {
            Some(i) => {
                let sum = &self.logs[i].0 + &c;
                if sum.is_zero() {
                    self.logs.remove(i);
                } else {
                    self.logs[i].0 = sum;
                }
            }
            None => self.logs.push((c, arg)),
        }
    }

    pub fn rational_part(&self) -> &DiffExpr {
        &self.rational
    }

    pub fn log_terms(&self) -> &[(Rational, DiffExpr)] {
        &self.logs
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.logs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = LogCombo { rational: self.rational.add(&other.rational), logs: self.logs.clone() };
        for (c, a) in &other.logs {
            out.push_log(c.clone(), a.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rational::from_integer(-1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LogCombo {
            rational: self.rational.scale(c),
            logs: self.logs.iter().map(|(k, a)| (k * c, a.clone())).collect(),
        }
    }

    /// Derivative; `log(A)` contributes `A'/A`, so the result has no logs.
    pub fn d_x(&self) -> Self {
        let mut parts = vec![self.rational.d_x()];
        for (c, a) in &self.logs {
            parts.push(a.d_x().div(a).scale(c));
        }
        Self::from_expr(DiffExpr::sum(parts.iter()))
    }

    pub fn d_x_n(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |acc, _| acc.d_x())
    }

    /// The rational part, if there are no logarithms.
    pub fn as_expr(&self) -> Option<&DiffExpr> {
        if self.logs.is_empty() {
            Some(&self.rational)
        } else {
            None
        }
    }

    pub fn display_with(&self, names: Names) -> String {
        let mut parts = Vec::new();
        if !self.rational.is_zero() || self.logs.is_empty() {
            parts.push(self.rational.display_with(names).to_string());
        }
        for (c, a) in &self.logs {
            let arg = a.display_with(names).to_string();
            let body = format!("log({arg})");
            let neg = c.is_negative();
            let abs = c.abs();
            let t = if abs.is_one() { body } else { format!("({abs})*{body}") };
            if parts.is_empty() {
                parts.push(if neg { format!("-{t}") } else { t });
            } else {
                parts.push(if neg { format!("- {t}") } else { format!("+ {t}") });
            }
        }
        parts.join(" ")
    }
}

impl From<DiffExpr> for LogCombo {
    fn from(e: DiffExpr) -> Self {
        LogCombo::from_expr(e)
    }
}

impl fmt::Display for LogCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(Names::UZ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;
    use crate::diffring::parse_expr;

    #[test]
    fn log_derivative() {
        let d = DiffExpr::discriminant();
        let l = LogCombo::log(q(1, 1), d.clone()).unwrap();
        let expected = parse_expr("(2*z'*z'' - z'*(u')^2 - 2*z*u'*u'')/((z')^2 - z*(u')^2)").unwrap();
        assert_eq!(l.d_x().as_expr(), Some(&expected));
    }

    #[test]
    fn merges_equal_arguments() {
        let z = parse_expr("z").unwrap();
        let a = LogCombo::log(q(1, 2), z.clone()).unwrap();
        let b = LogCombo::log(q(-1, 2), z).unwrap();
        assert!(a.add(&b).is_zero());
        assert!(LogCombo::log(q(1, 1), DiffExpr::constant(q(2, 1))).is_none());
    }
}
