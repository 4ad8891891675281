//! Text syntax for expressions: `+ - * / ^`, parentheses, rationals,
//! `x`, jets `u`, `u'`, `u''`, `u^(k)` (likewise `z`; `s`, `r` are accepted as
//! aliases of `u`, `z`), and `log(...)` in linear position.

use thiserror::Error;

use crate::algebra::Rational;

use super::{DiffExpr, JetVariable, LogCombo};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character {0:?} at offset {1}")]
    UnexpectedChar(char, usize),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {0} at offset {1}")]
    Expected(&'static str, usize),
    #[error("unknown identifier {0:?}")]
    UnknownIdent(String),
    #[error("logarithm used in a non-linear position")]
    NonLinearLog,
    #[error("logarithm of a constant")]
    ConstantLog,
    #[error("division by zero")]
    DivisionByZero,
    #[error("trailing input at offset {0}")]
    Trailing(usize),
}

enum Value {
    Rat(DiffExpr),
    Log(LogCombo),
}

impl Value {
    fn into_log(self) -> LogCombo {
        match self {
            Value::Rat(e) => LogCombo::from_expr(e),
            Value::Log(l) => l,
        }
    }

    fn add(self, other: Value) -> Value {
        match (self, other) {
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a.add(&b)),
            (a, b) => Value::Log(a.into_log().add(&b.into_log())),
        }
    }

    fn neg(self) -> Value {
        match self {
            Value::Rat(a) => Value::Rat(a.neg()),
            Value::Log(l) => Value::Log(l.neg()),
        }
    }

    fn mul(self, other: Value) -> Result<Value, ParseError> {
        Ok(match (self, other) {
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a.mul(&b)),
            (Value::Rat(a), Value::Log(l)) | (Value::Log(l), Value::Rat(a)) => {
                let c = a.constant_value().ok_or(ParseError::NonLinearLog)?;
                Value::Log(l.scale(&c))
            }
            _ => return Err(ParseError::NonLinearLog),
        })
    }

    fn div(self, other: Value) -> Result<Value, ParseError> {
        let Value::Rat(b) = other else {
            return Err(ParseError::NonLinearLog);
        };
        if b.is_zero() {
            return Err(ParseError::DivisionByZero);
        }
        Ok(match self {
            Value::Rat(a) => Value::Rat(a.div(&b)),
            Value::Log(l) => {
                let c = b.constant_value().ok_or(ParseError::NonLinearLog)?;
                Value::Log(l.scale(&c.recip()))
            }
        })
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8, what: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::Expected(what, self.pos))
        }
    }

    fn expr(&mut self) -> Result<Value, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.add(self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Value, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(self.unary()?)?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = acc.div(self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Value, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Value, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let e = if self.peek() == Some(b'(') {
            self.pos += 1;
            let e = self.integer()?;
            self.expect(b')', "')'")?;
            e
        } else {
            self.integer()?
        };
        match base {
            Value::Rat(b) => {
                if e < 0 && b.is_zero() {
                    return Err(ParseError::DivisionByZero);
                }
                Ok(Value::Rat(b.pow(e as i32)))
            }
            Value::Log(_) => Err(ParseError::NonLinearLog),
        }
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| ParseError::Expected("integer", start))
    }

    fn atom(&mut self) -> Result<Value, ParseError> {
        let Some(c) = self.peek() else {
            return Err(ParseError::UnexpectedEnd);
        };
        if c == b'(' {
            self.pos += 1;
            let v = self.expr()?;
            self.expect(b')', "')'")?;
            return Ok(v);
        }
        if c.is_ascii_digit() || c == b'.' {
            let start = self.pos;
            while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
                self.pos += 1;
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let r: Rational = text.parse().map_err(|_| ParseError::Expected("number", start))?;
            return Ok(Value::Rat(DiffExpr::constant(r)));
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            let ident = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
            return self.identifier(ident);
        }
        Err(ParseError::UnexpectedChar(c as char, self.pos))
    }

    fn identifier(&mut self, ident: String) -> Result<Value, ParseError> {
        let base = match ident.as_str() {
            "x" => return Ok(Value::Rat(DiffExpr::x())),
            "log" => {
                self.expect(b'(', "'(' after log")?;
                let arg = self.expr()?;
                self.expect(b')', "')'")?;
                let Value::Rat(a) = arg else {
                    return Err(ParseError::NonLinearLog);
                };
                return LogCombo::log(Rational::one(), a).map(Value::Log).ok_or(ParseError::ConstantLog);
            }
            "u" | "s" => JetVariable::u as fn(u32) -> JetVariable,
            "z" | "r" => JetVariable::z as fn(u32) -> JetVariable,
            _ => return Err(ParseError::UnknownIdent(ident)),
        };
        // jet order: primes, or ^(k) directly after the letter
        let mut order = 0u32;
        while self.src.get(self.pos) == Some(&b'\'') {
            order += 1;
            self.pos += 1;
        }
        if order == 0 && self.src.get(self.pos) == Some(&b'^') && self.src.get(self.pos + 1) == Some(&b'(') {
            let save = self.pos;
            self.pos += 2;
            let digits_start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos > digits_start && self.src.get(self.pos) == Some(&b')') {
                order = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap().parse().unwrap();
                self.pos += 1;
            } else {
                self.pos = save;
            }
        }
        if order > super::MAX_ORDER {
            return Err(ParseError::UnknownIdent(format!("{ident}^({order})")));
        }
        Ok(Value::Rat(DiffExpr::jet(base(order))))
    }
}

fn parse_value(src: &str) -> Result<Value, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(ParseError::Trailing(p.pos));
    }
    Ok(v)
}

/// Parses a rational expression; logarithms are rejected.
pub fn parse_expr(src: &str) -> Result<DiffExpr, ParseError> {
    match parse_value(src)? {
        Value::Rat(e) => Ok(e),
        Value::Log(_) => Err(ParseError::NonLinearLog),
    }
}

/// Parses a rational expression plus rational multiples of `log(...)`.
pub fn parse_log_combo(src: &str) -> Result<LogCombo, ParseError> {
    Ok(parse_value(src)?.into_log())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;

    #[test]
    fn jets_and_powers() {
        let a = parse_expr("u^(4) + (u'''')").unwrap();
        assert_eq!(a, DiffExpr::jet(JetVariable::u(4)).scale(&q(2, 1)));
        let b = parse_expr("z^2/z").unwrap();
        assert_eq!(b, DiffExpr::jet(JetVariable::z(0)));
        assert_eq!(parse_expr("x^-2*x^(2)").unwrap(), DiffExpr::one());
        assert_eq!(parse_expr("1/2 - 0.5").unwrap(), DiffExpr::zero());
    }

    #[test]
    fn logs_are_linear() {
        let l = parse_log_combo("(1/24)*log((z')^2 - z*(u')^2) - log(z/x)/12").unwrap();
        assert_eq!(l.log_terms().len(), 2);
        assert_eq!(parse_log_combo("log(z)*log(z)").unwrap_err(), ParseError::NonLinearLog);
        assert_eq!(parse_expr("log(z)").unwrap_err(), ParseError::NonLinearLog);
        assert_eq!(parse_log_combo("log(2)").unwrap_err(), ParseError::ConstantLog);
    }

    #[test]
    fn roundtrips_through_display() {
        for s in ["z*u'/((z')^2 - z*(u')^2)", "u^(5)*z'' - 3/4*x", "1/(240*x^2)", "(u + z)/(z*u')"] {
            let e = parse_expr(s).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{s} -> {e}");
        }
    }
}
