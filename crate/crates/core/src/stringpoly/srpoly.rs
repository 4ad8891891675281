use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{Coefficient, Rational};

/// Polynomial in `s` and `r^(1/2)`, allowing negative powers of `r`.
/// Keys are `(s exponent, twice the r exponent)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SrPoly {
    terms: BTreeMap<(u32, i32), Rational>,
}

impl SrPoly {
    pub fn zero() -> Self {
        SrPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(0, 0, &c);
        p
    }

    pub fn monomial(s_exp: u32, r_half: i32, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(s_exp, r_half, &c);
        p
    }

    pub fn s() -> Self {
        Self::monomial(1, 0, Rational::one())
    }

    pub fn r() -> Self {
        Self::monomial(0, 2, Rational::one())
    }

    pub fn add_term(&mut self, s_exp: u32, r_half: i32, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let key = (s_exp, r_half);
        let v = self.terms.get(&key).map_or_else(|| c.clone(), |old| old + c);
        if v.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, i32, &Rational)> {
        self.terms.iter().map(|((a, b), c)| (*a, *b, c))
    }

    pub fn coeff(&self, s_exp: u32, r_half: i32) -> Rational {
        self.terms.get(&(s_exp, r_half)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_term(*a, *b, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        SrPoly { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        SrPoly { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                out.add_term(a1 + a2, b1 + b2, &(c1 * c2));
            }
        }
        out
    }

    /// Multiplies by `r^(half/2)`.
    pub fn mul_r_half(&self, half: i32) -> Self {
        SrPoly { terms: self.terms.iter().map(|((a, b), c)| ((*a, b + half), c.clone())).collect() }
    }

    pub fn d_s(&self) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            if *a > 0 {
                out.add_term(a - 1, *b, &(c * &Rational::from(*a)));
            }
        }
        out
    }

    pub fn d_r(&self) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            if *b != 0 {
                out.add_term(*a, b - 2, &(c * &Rational::new(*b as i64, 2)));
            }
        }
        out
    }

    pub fn d_s_n(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |p, _| p.d_s())
    }

    pub fn d_r_n(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |p, _| p.d_r())
    }
}

impl Coefficient for SrPoly {
    fn zero() -> Self {
        SrPoly::zero()
    }
    fn one() -> Self {
        SrPoly::constant(Rational::one())
    }
    fn is_zero(&self) -> bool {
        SrPoly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        SrPoly::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        SrPoly::mul(self, other)
    }
    fn neg(&self) -> Self {
        SrPoly::neg(self)
    }
    fn from_rational(c: &Rational) -> Self {
        SrPoly::constant(c.clone())
    }
    fn scale(&self, c: &Rational) -> Self {
        SrPoly::scale(self, c)
    }
}

pub(crate) fn r_power_text(half: i32) -> Option<String> {
    match half {
        0 => None,
        2 => Some("r".to_string()),
        h if h % 2 == 0 => Some(format!("r^{}", h / 2)),
        h => Some(format!("r^({h}/2)")),
    }
}

impl fmt::Display for SrPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, b), c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            match a {
                0 => {}
                1 => factors.push("s".to_string()),
                a => factors.push(format!("s^{a}")),
            }
            factors.extend(r_power_text(*b));
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let abs = c.abs();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SrPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;

    #[test]
    fn derivatives_handle_half_powers() {
        // d/dr r^(3/2) = 3/2 r^(1/2)
        let p = SrPoly::monomial(0, 3, q(1, 1));
        assert_eq!(p.d_r(), SrPoly::monomial(0, 1, q(3, 2)));
        let s2r = SrPoly::monomial(2, 2, q(1, 1));
        assert_eq!(s2r.d_s(), SrPoly::monomial(1, 2, q(2, 1)));
        assert_eq!(s2r.to_string(), "s^2*r");
    }
}
