//! Truncated power series in the couplings `t_j`, with coefficients carrying
//! explicit (half-integer) powers of `x`.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{Coefficient, Rational};

/// Highest valence supported in a coupling exponent vector.
pub const MAX_COUPLING: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TExp(pub [u8; MAX_COUPLING]);

impl TExp {
    pub fn single(j: usize, n: u8) -> Self {
        let mut e = [0; MAX_COUPLING];
        e[j - 1] = n;
        TExp(e)
    }

    /// Exponent of `t_j`.
    pub fn get(&self, j: usize) -> u8 {
        self.0[j - 1]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &TExp) -> TExp {
        let mut e = [0; MAX_COUPLING];
        for (i, slot) in e.iter_mut().enumerate() {
            *slot = self.0[i] + other.0[i];
        }
        TExp(e)
    }

    /// `(j, n_j)` for the couplings that occur.
    pub fn profile(&self) -> Vec<(usize, u8)> {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i + 1, e)).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("division by a series whose constant coupling term is not a single monomial")]
    DivisionByZeroSeries,
    #[error("logarithm of a series whose constant coupling term is not 1")]
    NonUnitLog,
    #[error("monomial x^{0} has no antiderivative with zero lower limit")]
    NonIntegrableMonomial(String),
}

/// Key: coupling exponents and twice the exponent of `x`.
pub type SeriesKey = (TExp, i32);

#[derive(Clone, PartialEq, Eq)]
pub struct CouplingSeries {
    terms: BTreeMap<SeriesKey, Rational>,
    /// Terms of total coupling degree above this bound are dropped; `None`
    /// for exact (polynomial) values.
    order: Option<u32>,
}

impl CouplingSeries {
    pub fn zero(order: Option<u32>) -> Self {
        CouplingSeries { terms: BTreeMap::new(), order }
    }

    pub fn zero_like(other: &Self) -> Self {
        Self::zero(other.order)
    }

    pub fn one_like(other: &Self) -> Self {
        Self::monomial(TExp::default(), 0, Rational::one(), other.order)
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(TExp::default(), 0, c, None)
    }

    /// `c * t^e * x^(x_half/2)`.
    pub fn monomial(t: TExp, x_half: i32, c: Rational, order: Option<u32>) -> Self {
        let mut s = Self::zero(order);
        s.add_term((t, x_half), &c);
        s
    }

    /// The series `x`.
    pub fn x() -> Self {
        Self::monomial(TExp::default(), 2, Rational::one(), None)
    }

    pub fn order(&self) -> Option<u32> {
        self.order
    }

    pub fn with_order(mut self, order: Option<u32>) -> Self {
        self.order = min_order(self.order, order);
        if let Some(k) = self.order {
            self.terms.retain(|(t, _), _| t.degree() <= k);
        }
        self
    }

    fn keeps(&self, t: &TExp) -> bool {
        self.order.is_none_or(|k| t.degree() <= k)
    }

    pub fn add_term(&mut self, key: SeriesKey, c: &Rational) {
        if c.is_zero() || !self.keeps(&key.0) {
            return;
        }
        let v = self.terms.get(&key).map_or_else(|| c.clone(), |old| old + c);
        if v.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SeriesKey, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, t: &TExp, x_half: i32) -> Rational {
        self.terms.get(&(*t, x_half)).cloned().unwrap_or_default()
    }

    /// All `(x_half, coeff)` pairs attached to a coupling monomial.
    pub fn coefficient_of(&self, t: &TExp) -> Vec<(i32, Rational)> {
        self.terms.iter().filter(|((s, _), _)| s == t).map(|((_, x), c)| (*x, c.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone().with_order(other.order);
        for (k, c) in &other.terms {
            out.add_term(*k, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        CouplingSeries { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(), order: self.order }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.order);
        for (k, v) in &self.terms {
            out.add_term(*k, &(v * c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(min_order(self.order, other.order));
        for ((t1, x1), c1) in &self.terms {
            for ((t2, x2), c2) in &other.terms {
                let t = t1.mul(t2);
                if out.keeps(&t) {
                    out.add_term((t, x1 + x2), &(c1 * c2));
                }
            }
        }
        out
    }

    pub fn d_x(&self) -> Self {
        let mut out = Self::zero(self.order);
        for ((t, x), c) in &self.terms {
            if *x != 0 {
                out.add_term((*t, x - 2), &(c * &Rational::new(*x as i64, 2)));
            }
        }
        out
    }

    /// The coupling-degree-0 part, if it is a single monomial `c x^q`.
    fn leading_monomial(&self) -> Option<(i32, Rational)> {
        let mut lead = self.terms.iter().filter(|((t, _), _)| t.is_zero());
        let ((_, x), c) = lead.next()?;
        if lead.next().is_some() {
            return None;
        }
        Some((*x, c.clone()))
    }

    /// Requires a truncation order or a monomial input, since the inverse is
    /// otherwise an infinite series.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        let (xq, c) = self.leading_monomial().ok_or(SeriesError::DivisionByZeroSeries)?;
        let lead_inv = Self::monomial(TExp::default(), -xq, c.recip(), self.order);
        // self = lead * (1 + w), w of positive coupling degree
        let w = self.mul(&lead_inv).sub(&Self::one_like(self));
        if w.is_zero() {
            return Ok(lead_inv);
        }
        let k = self.order.ok_or(SeriesError::DivisionByZeroSeries)?;
        let mut acc = Self::one_like(self);
        let mut pw = Self::one_like(self);
        for _ in 0..k {
            pw = pw.mul(&w).neg();
            acc = acc.add(&pw);
        }
        Ok(acc.mul(&lead_inv))
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul(&other.inv()?))
    }

    /// `log(self)` for a series whose coupling-degree-0 part is exactly 1.
    pub fn log(&self) -> Result<Self, SeriesError> {
        match self.leading_monomial() {
            Some((0, c)) if c.is_one() => {}
            _ => return Err(SeriesError::NonUnitLog),
        }
        let w = self.sub(&Self::one_like(self));
        if w.is_zero() {
            return Ok(Self::zero(self.order));
        }
        let k = self.order.ok_or(SeriesError::NonUnitLog)?;
        let mut acc = Self::zero(self.order);
        let mut pw = Self::one_like(self);
        for n in 1..=k {
            pw = pw.mul(&w);
            let sign = if n % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&pw.scale(&Rational::new(sign, n as i64)));
        }
        Ok(acc)
    }

    /// Termwise `int_0^x int_0^x1`, rejecting `x^-1` and `x^-2`.
    pub fn double_antiderivative(&self) -> Result<Self, SeriesError> {
        let mut out = Self::zero(self.order);
        for ((t, x), c) in &self.terms {
            // x^q -> x^(q+2) / ((q+1)(q+2)), with q = x/2
            let a = Rational::new(*x as i64 + 2, 2);
            let b = Rational::new(*x as i64 + 4, 2);
            if a.is_zero() || b.is_zero() || a.is_negative() || b.is_negative() {
                return Err(SeriesError::NonIntegrableMonomial(Rational::new(*x as i64, 2).to_string()));
            }
            out.add_term((*t, x + 4), &(c / &(a * b)));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|((t, x), c)| {
                    let exps: Vec<u8> = t.0.to_vec();
                    json!({
                        "t_exponents": exps,
                        "x_exponent": Rational::new(*x as i64, 2).to_string(),
                        "coeff": c.to_string(),
                    })
                })
                .collect(),
        )
    }
}

fn min_order(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl Coefficient for CouplingSeries {
    fn zero() -> Self {
        CouplingSeries::zero(None)
    }
    fn one() -> Self {
        CouplingSeries::constant(Rational::one())
    }
    fn is_zero(&self) -> bool {
        CouplingSeries::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        CouplingSeries::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        CouplingSeries::mul(self, other)
    }
    fn neg(&self) -> Self {
        CouplingSeries::neg(self)
    }
    fn from_rational(c: &Rational) -> Self {
        CouplingSeries::constant(c.clone())
    }
    fn scale(&self, c: &Rational) -> Self {
        CouplingSeries::scale(self, c)
    }
}

impl fmt::Display for CouplingSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((t, x), c) in &self.terms {
            let mut factors = Vec::new();
            for (j, n) in t.profile() {
                factors.push(if n == 1 { format!("t{j}") } else { format!("t{j}^{n}") });
            }
            match x {
                0 => {}
                2 => factors.push("x".into()),
                x if x % 2 == 0 => factors.push(format!("x^{}", x / 2)),
                x => factors.push(format!("x^({x}/2)")),
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
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
        if let Some(k) = self.order {
            write!(f, " + O(t^{})", k + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for CouplingSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;

    fn t4(n: u8) -> TExp {
        TExp::single(4, n)
    }

    #[test]
    fn inverse_and_log() {
        // 1 + t4 x, truncated at order 3
        let a = CouplingSeries::constant(q(1, 1)).add(&CouplingSeries::monomial(t4(1), 2, q(1, 1), Some(3)));
        let inv = a.inv().unwrap();
        assert_eq!(a.mul(&inv), CouplingSeries::one_like(&a));
        let l = a.log().unwrap();
        assert_eq!(l.coeff(&t4(2), 4), q(-1, 2));
        assert_eq!(l.coeff(&t4(3), 6), q(1, 3));
        assert_eq!(l.d_x(), a.d_x().mul(&inv));
    }

    #[test]
    fn antiderivative_of_monomials() {
        let a = CouplingSeries::monomial(t4(1), 2, q(6, 1), Some(2));
        let f = a.double_antiderivative().unwrap();
        assert_eq!(f.coeff(&t4(1), 6), q(1, 1));
        let bad = CouplingSeries::monomial(t4(1), -2, q(1, 1), Some(2));
        assert!(bad.double_antiderivative().is_err());
    }
}
