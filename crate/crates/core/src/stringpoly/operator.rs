use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::algebra::{trinomial_power, Rational};

use super::srpoly::{r_power_text, SrPoly};

/// One normal-ordered term `r^(r_half/2) d_s^ds d_r^dr`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpKey {
    pub r_half: i32,
    pub ds: u32,
    pub dr: u32,
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct OperatorPoly {
    terms: BTreeMap<OpKey, Rational>,
}

impl OperatorPoly {
    pub fn zero() -> Self {
        OperatorPoly { terms: BTreeMap::new() }
    }

    pub fn identity() -> Self {
        Self::term(0, 0, 0, Rational::one())
    }

    pub fn term(r_half: i32, ds: u32, dr: u32, c: Rational) -> Self {
        let mut o = Self::zero();
        o.add_term(OpKey { r_half, ds, dr }, &c);
        o
    }

    pub fn from_terms<I: IntoIterator<Item = (OpKey, Rational)>>(it: I) -> Self {
        let mut o = Self::zero();
        for (k, c) in it {
            o.add_term(k, &c);
        }
        o
    }

    pub fn add_term(&mut self, key: OpKey, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let v = self.terms.get(&key).map_or_else(|| c.clone(), |old| old + c);
        if v.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OpKey, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn max_dr(&self) -> u32 {
        self.terms.keys().map(|k| k.dr).max().unwrap_or(0)
    }

    /// `d_s^i d_r^j` composed on the left, brought back to normal order:
    /// `d_r^j r^a = sum_k C(j,k) a(a-1)...(a-k+1) r^(a-k) d_r^(j-k)`.
    pub fn compose_left(&self, i: u32, j: u32) -> Self {
        let mut out = Self::zero();
        for (key, c) in &self.terms {
            let a = Rational::new(key.r_half as i64, 2);
            let mut falling = Rational::one();
            for k in 0..=j {
                if k > 0 {
                    falling = &falling * &(&a - &Rational::from(k - 1));
                }
                if falling.is_zero() {
                    break;
                }
                let coeff = c * &Rational::binomial(j, k) * falling.clone();
                out.add_term(
                    OpKey { r_half: key.r_half - 2 * k as i32, ds: key.ds + i, dr: key.dr + j - k },
                    &coeff,
                );
            }
        }
        out
    }
}

/// Rewrites `r^a d_s^m d_r^b` with `b >= 2` as
/// `-(b-1) r^(a-1) d_s^m d_r^(b-1) + r^(a-1) d_s^(m+2) d_r^(b-2)`,
/// which holds on the generator family because `r G_rr + G_r - G_ss = 0`.
pub fn reduce_mod_i(op: &OperatorPoly) -> OperatorPoly {
    let mut work = op.clone();
    loop {
        let Some((&key, _)) = work.terms.iter().find(|(k, _)| k.dr >= 2) else {
            return work;
        };
        let c = work.terms.remove(&key).unwrap();
        let b = key.dr;
        work.add_term(
            OpKey { r_half: key.r_half - 2, ds: key.ds, dr: b - 1 },
            &(&c * &Rational::from_integer(-(b as i64 - 1))),
        );
        work.add_term(OpKey { r_half: key.r_half - 2, ds: key.ds + 2, dr: b - 2 }, &c);
    }
}

/// `[h^0](h + s + r/h)^(J-1)`.
pub fn generator(j: u32) -> Arc<SrPoly> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<SrPoly>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(g) = cache.lock().unwrap().get(&j) {
        return g.clone();
    }
    assert!(j >= 1, "generator index must be positive");
    let one = SrPoly::constant(Rational::one());
    let g = Arc::new(trinomial_power(&one, &SrPoly::s(), &SrPoly::r(), j - 1).coeff(0));
    cache.lock().unwrap().insert(j, g.clone());
    g
}

/// Applies the operator to an explicit polynomial.
pub fn apply_to(op: &OperatorPoly, f: &SrPoly) -> SrPoly {
    let mut out = SrPoly::zero();
    for (key, c) in &op.terms {
        let d = f.d_s_n(key.ds).d_r_n(key.dr);
        out = out.add(&d.mul_r_half(key.r_half).scale(c));
    }
    out
}

/// Applies the operator to the `J`-th generator.
pub fn apply(op: &OperatorPoly, j: u32) -> SrPoly {
    apply_to(op, &generator(j))
}

fn derivative_text(name: &str, n: u32) -> Option<String> {
    match n {
        0 => None,
        1 => Some(name.to_string()),
        n => Some(format!("{name}^{n}")),
    }
}

impl fmt::Display for OperatorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // descending in d_s, then d_r, then r power, like the printed table
        let mut keys: Vec<(&OpKey, &Rational)> = self.terms.iter().collect();
        keys.sort_by(|(a, _), (b, _)| (b.ds, b.dr, b.r_half).cmp(&(a.ds, a.dr, a.r_half)));
        for (i, (k, c)) in keys.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut factors = Vec::new();
            factors.extend(r_power_text(k.r_half));
            factors.extend(derivative_text("d_s", k.ds));
            factors.extend(derivative_text("d_r", k.dr));
            let abs = c.abs();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "({abs})*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for OperatorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;

    #[test]
    fn apply_examples() {
        assert_eq!(apply(&OperatorPoly::identity(), 3), SrPoly::monomial(2, 0, q(1, 1)).add(&SrPoly::monomial(0, 2, q(2, 1))));
        let op = OperatorPoly::term(0, 2, 0, q(1, 6)).add(&OperatorPoly::term(0, 0, 1, q(1, 12)));
        assert_eq!(apply(&op, 3), SrPoly::constant(q(1, 2)));
        assert!(apply(&OperatorPoly::term(0, 0, 1, q(1, 1)), 2).is_zero());
    }

    #[test]
    fn generator_satisfies_the_ideal_relation() {
        for j in 1..=12 {
            let g = generator(j);
            let rel = g.d_r_n(2).mul_r_half(2).add(&g.d_r()).sub(&g.d_s_n(2));
            assert!(rel.is_zero(), "J = {j}");
        }
    }

    #[test]
    fn reduction_examples() {
        let r_drr = OperatorPoly::term(2, 0, 2, q(1, 1));
        let expected = OperatorPoly::term(0, 2, 0, q(1, 1)).add(&OperatorPoly::term(0, 0, 1, q(-1, 1)));
        assert_eq!(reduce_mod_i(&r_drr), expected);
        let ds3 = OperatorPoly::term(0, 3, 0, q(1, 1));
        assert_eq!(reduce_mod_i(&ds3), ds3);
        let big = OperatorPoly::term(4, 0, 3, q(1, 1));
        let red = reduce_mod_i(&big);
        assert!(red.max_dr() <= 1);
        for j in 2..=10 {
            assert_eq!(apply(&red, j), apply(&big, j));
        }
    }

    #[test]
    fn composition_matches_sequential_application() {
        let op = OperatorPoly::term(-2, 1, 1, q(1, 3)).add(&OperatorPoly::term(3, 0, 0, q(-2, 1)));
        for (i, j) in [(0, 1), (1, 2), (2, 0), (0, 3)] {
            let composed = op.compose_left(i, j);
            for n in 1..=8 {
                let direct = apply(&op, n).d_s_n(i).d_r_n(j);
                assert_eq!(apply(&composed, n), direct, "i={i} j={j} J={n}");
            }
        }
    }
}
