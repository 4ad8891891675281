use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::series::{CouplingSeries, TExp, MAX_COUPLING};
use crate::algebra::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PotentialParseError {
    #[error("empty potential")]
    Empty,
    #[error("cannot read factor `{0}`")]
    BadFactor(String),
    #[error("coupling t{index} multiplies l^{power}; the index must equal the power")]
    IndexMismatch { index: usize, power: usize },
    #[error("l^{0} appears more than once")]
    Duplicate(usize),
    #[error("the quadratic term must be exactly 0.5*l^2")]
    BadGaussian,
    #[error("power {0} is outside 2..={max}", max = MAX_COUPLING)]
    PowerOutOfRange(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Term {
    scale: Rational,
    /// `None` for a symbolic coupling `t_j`; otherwise the numeric value the
    /// coupling is set to after expansion.
    value: Option<Rational>,
}

/// `V(l) = l^2/2 + sum_j c_j t_j l^j`. Numeric terms `a*l^j` are carried as a
/// formal `t_j` with `c_j = 1` and substituted with `t_j = a` at the end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Potential {
    terms: BTreeMap<usize, Term>,
}

impl Potential {
    /// Parses sums like `0.5*l^2 + t3*l^3 - 2*t4*l^4 + 0.1*l^6`. `λ` is
    /// accepted for `l`.
    pub fn parse(src: &str) -> Result<Self, PotentialParseError> {
        let cleaned: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(PotentialParseError::Empty);
        }
        let mut gaussian = false;
        let mut terms = BTreeMap::new();
        for (sign, body) in split_terms(&cleaned)? {
            let mut coeff = Rational::from_integer(sign);
            let mut coupling = None;
            let mut power = 0usize;
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(PotentialParseError::BadFactor(body.to_string()));
                }
                if let Some(rest) = factor.strip_prefix('l').or_else(|| factor.strip_prefix('λ')) {
                    let p = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .and_then(|e| e.parse::<usize>().ok())
                            .ok_or_else(|| PotentialParseError::BadFactor(factor.to_string()))?
                    };
                    power += p;
                } else if let Some(idx) = factor.strip_prefix('t') {
                    let j = idx.parse::<usize>().map_err(|_| PotentialParseError::BadFactor(factor.to_string()))?;
                    if coupling.replace(j).is_some() {
                        return Err(PotentialParseError::BadFactor(body.to_string()));
                    }
                } else {
                    let c: Rational =
                        factor.parse().map_err(|_| PotentialParseError::BadFactor(factor.to_string()))?;
                    coeff = coeff * c;
                }
            }
            if coeff.is_zero() {
                continue;
            }
            if !(2..=MAX_COUPLING).contains(&power) {
                return Err(PotentialParseError::PowerOutOfRange(power));
            }
            let term = match coupling {
                Some(j) if j != power => return Err(PotentialParseError::IndexMismatch { index: j, power }),
                Some(_) => Term { scale: coeff, value: None },
                None if power == 2 => {
                    if gaussian || coeff != Rational::new(1, 2) {
                        return Err(PotentialParseError::BadGaussian);
                    }
                    gaussian = true;
                    continue;
                }
                None => Term { scale: Rational::one(), value: Some(coeff) },
            };
            if terms.insert(power, term).is_some() {
                return Err(PotentialParseError::Duplicate(power));
            }
        }
        if !gaussian {
            return Err(PotentialParseError::BadGaussian);
        }
        Ok(Potential { terms })
    }

    /// `c_j` for the coupling `t_j`.
    pub fn scale_of(&self, j: usize) -> Option<Rational> {
        self.terms.get(&j).map(|t| t.scale.clone())
    }

    pub fn is_symbolic(&self) -> bool {
        self.terms.values().all(|t| t.value.is_none())
    }

    /// `(j, c_j t_j)` for every coupling term.
    pub fn coupling_series(&self) -> Vec<(usize, CouplingSeries)> {
        self.terms
            .iter()
            .map(|(j, t)| (*j, CouplingSeries::monomial(TExp::single(*j, 1), 0, t.scale.clone(), None)))
            .collect()
    }

    pub fn max_power(&self) -> usize {
        self.terms.keys().next_back().copied().unwrap_or(2)
    }

    /// Coefficients of `V^(k)(l)` as a polynomial in `l`, indexed by power.
    pub fn derivative_coefficients(&self, k: u32) -> Vec<CouplingSeries> {
        let k = k as usize;
        let top = self.max_power();
        let mut out = vec![CouplingSeries::zero(None); top.saturating_sub(k) + 1];
        let falling = |j: usize| (0..k).fold(Rational::one(), |acc, i| acc * Rational::from_integer((j - i) as i64));
        if k <= 2 {
            out[2 - k] = CouplingSeries::constant(Rational::new(1, 2) * falling(2));
        }
        for (j, c) in self.coupling_series() {
            if j >= k {
                out[j - k] = out[j - k].add(&c.scale(&falling(j)));
            }
        }
        out
    }

    /// Replaces every numeric coupling `t_j` by its value.
    pub fn substitute_values(&self, f: &CouplingSeries) -> CouplingSeries {
        let numeric: Vec<(usize, Rational)> =
            self.terms.iter().filter_map(|(j, t)| t.value.clone().map(|v| (*j, v))).collect();
        if numeric.is_empty() {
            return f.clone();
        }
        let mut out = CouplingSeries::zero(None);
        for ((t, x), c) in f.terms() {
            let mut e = *t;
            let mut c = c.clone();
            for (j, v) in &numeric {
                c = c * v.pow(t.get(*j) as i32);
                e.0[j - 1] = 0;
            }
            out.add_term((e, *x), &c);
        }
        out
    }
}

fn split_terms(s: &str) -> Result<Vec<(i64, &str)>, PotentialParseError> {
    let mut out = Vec::new();
    let mut sign = 1;
    let mut start = 0;
    let bytes: Vec<(usize, char)> = s.char_indices().collect();
    for (pos, &(i, c)) in bytes.iter().enumerate() {
        let after_caret = pos > 0 && bytes[pos - 1].1 == '^';
        if (c == '+' || c == '-') && !after_caret {
            if i > start {
                out.push((sign, &s[start..i]));
            } else if i > 0 {
                return Err(PotentialParseError::BadFactor(s.to_string()));
            }
            sign = if c == '-' { -1 } else { 1 };
            start = i + 1;
        }
    }
    if start >= s.len() {
        return Err(PotentialParseError::BadFactor(s.to_string()));
    }
    out.push((sign, &s[start..]));
    Ok(out)
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/2*l^2")?;
        for (j, t) in &self.terms {
            match &t.value {
                None if t.scale.is_one() => write!(f, " + t{j}*l^{j}")?,
                None => write!(f, " + ({})*t{j}*l^{j}", t.scale)?,
                Some(v) => write!(f, " + ({v})*l^{j}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;

    #[test]
    fn parses_mixed_terms() {
        let v = Potential::parse("0.5*l^2 + t3*l^3 - 2*t4*l^4 + 0.1*l^6").unwrap();
        assert_eq!(v.scale_of(3), Some(q(1, 1)));
        assert_eq!(v.scale_of(4), Some(q(-2, 1)));
        assert_eq!(v.scale_of(6), Some(q(1, 1)));
        assert!(!v.is_symbolic());
        assert_eq!(v.max_power(), 6);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Potential::parse(""), Err(PotentialParseError::Empty));
        assert_eq!(Potential::parse("t4*l^4"), Err(PotentialParseError::BadGaussian));
        assert_eq!(Potential::parse("l^2 + t4*l^4"), Err(PotentialParseError::BadGaussian));
        assert_eq!(
            Potential::parse("0.5*l^2 + t3*l^4"),
            Err(PotentialParseError::IndexMismatch { index: 3, power: 4 })
        );
        assert!(matches!(Potential::parse("0.5*l^2 + x*l^4"), Err(PotentialParseError::BadFactor(_))));
        assert_eq!(Potential::parse("0.5*l^2 + t1*l"), Err(PotentialParseError::PowerOutOfRange(1)));
    }

    #[test]
    fn derivative_coefficients_of_quartic() {
        let v = Potential::parse("1/2*l^2 + t4*l^4").unwrap();
        let d1 = v.derivative_coefficients(1);
        assert_eq!(d1.len(), 4);
        assert_eq!(d1[1], CouplingSeries::constant(q(1, 1)));
        assert_eq!(d1[3].coeff(&TExp::single(4, 1), 0), q(4, 1));
        let d3 = v.derivative_coefficients(3);
        assert!(d3[0].is_zero());
        assert_eq!(d3[1].coeff(&TExp::single(4, 1), 0), q(24, 1));
    }

    #[test]
    fn numeric_values_substitute() {
        let v = Potential::parse("0.5*l^2 + 0.5*l^4").unwrap();
        let s = CouplingSeries::monomial(TExp::single(4, 2), 4, q(3, 1), None);
        let out = v.substitute_values(&s);
        assert_eq!(out.coeff(&TExp::default(), 4), q(3, 4));
    }
}
