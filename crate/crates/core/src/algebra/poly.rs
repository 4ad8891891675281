//! Sparse multivariate polynomials over `Rational`.
//!
//! Variables are small integer indices; their meaning (jets, `x`, ...) is
//! assigned by the caller. Terms are kept sorted by the lexicographic order on
//! exponent vectors, which is a monomial order, so the last term is the
//! leading term used by exact division.

use std::fmt;

use rustc_hash::FxHashMap;

use super::{Coefficient, Rational};

pub const MAX_VARS: usize = 32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial([u8; MAX_VARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; MAX_VARS]);

    pub fn var(index: usize, exp: u8) -> Self {
        let mut m = Self::ONE;
        m.0[index] = exp;
        m
    }

    pub fn exp(&self, index: usize) -> u8 {
        self.0[index]
    }

    pub fn set_exp(&mut self, index: usize, exp: u8) {
        self.0[index] = exp;
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = [0u8; MAX_VARS];
        for i in 0..MAX_VARS {
            out[i] = self.0[i]
                .checked_add(other.0[i])
                .expect("monomial exponent overflow");
        }
        Monomial(out)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut out = [0u8; MAX_VARS];
        for i in 0..MAX_VARS {
            out[i] = other.0[i] - self.0[i];
        }
        Monomial(out)
    }

    /// Nonzero `(variable, exponent)` pairs in index order.
    pub fn factors(&self) -> impl Iterator<Item = (usize, u8)> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors().map(|(i, e)| format!("v{i}^{e}")).collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: Vec<(Monomial, Rational)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(Monomial::ONE, c)] }
        }
    }

    pub fn var(index: usize) -> Self {
        Self::monomial(Monomial::var(index, 1), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut acc: FxHashMap<Monomial, Rational> = FxHashMap::default();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            acc.entry(m).and_modify(|e| *e += &c).or_insert(c);
        }
        Self::from_map(acc)
    }

    fn from_map(acc: FxHashMap<Monomial, Rational>) -> Self {
        let mut terms: Vec<(Monomial, Rational)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, Rational)> {
        self.terms.last()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        // merge of two sorted lists
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Poly { terms: out }
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (*m, k * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        // multiplication by a monomial preserves the lex order
        Poly { terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_monomial(m, c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_monomial(m, c);
        }
        let mut acc: FxHashMap<Monomial, Rational> =
            FxHashMap::with_capacity_and_hasher(self.terms.len() * other.terms.len() / 2 + 1, Default::default());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c = c1 * c2;
                acc.entry(m1.mul(m2)).and_modify(|e| *e += &c).or_insert(c);
            }
        }
        Self::from_map(acc)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn min_exp(&self, var: usize) -> u8 {
        self.terms.iter().map(|(m, _)| m.exp(var)).min().unwrap_or(0)
    }

    pub fn max_exp(&self, var: usize) -> u8 {
        self.terms.iter().map(|(m, _)| m.exp(var)).max().unwrap_or(0)
    }

    /// Divides every term by `var^k`; caller guarantees `k <= min_exp(var)`.
    pub fn div_var_pow(&self, var: usize, k: u8) -> Poly {
        let d = Monomial::var(var, k);
        Poly { terms: self.terms.iter().map(|(m, c)| (d.quotient_of(m), c.clone())).collect() }
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading().expect("division by zero polynomial");
        if divisor.terms.len() == 1 {
            if !self.terms.iter().all(|(m, _)| lm.divides(m)) {
                return None;
            }
            let inv = lc.recip();
            let mut terms: Vec<_> = self.terms.iter().map(|(m, c)| (lm.quotient_of(m), c * &inv)).collect();
            terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
            return Some(Poly { terms });
        }
        let inv = lc.recip();
        let mut rem: std::collections::BTreeMap<Monomial, Rational> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.pop_last() {
            if !lm.divides(&m) {
                return None;
            }
            let qm = lm.quotient_of(&m);
            let qc = &c * &inv;
            // subtract qc*qm*divisor, skipping the leading term already removed
            for (dm, dc) in divisor.terms.iter().rev().skip(1) {
                let key = dm.mul(&qm);
                let delta = &qc * dc;
                match rem.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let v = e.get() - &delta;
                        if v.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = v;
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-delta);
                    }
                }
            }
            quot.push((qm, qc));
        }
        quot.reverse();
        Some(Poly { terms: quot })
    }

    /// Maps every monomial through `f`, summing collisions.
    pub fn map_monomials<F: FnMut(&Monomial) -> Monomial>(&self, mut f: F) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (f(m), c.clone())))
    }

    pub fn retain_terms<F: FnMut(&Monomial, &Rational) -> bool>(&self, mut f: F) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, c)| f(m, c)).cloned().collect() }
    }

    /// Evaluates the polynomial in any coefficient ring, given the image of
    /// every variable that occurs.
    pub fn eval<C: Coefficient, F: FnMut(usize) -> C>(&self, mut image: F) -> C {
        let mut powers: FxHashMap<(usize, u8), C> = FxHashMap::default();
        let mut bases: FxHashMap<usize, C> = FxHashMap::default();
        let mut acc: Vec<C> = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut t = C::from_rational(c);
            for (v, e) in m.factors() {
                let pw = powers.entry((v, e)).or_insert_with(|| {
                    let b = bases.entry(v).or_insert_with(|| image(v)).clone();
                    let mut p = C::one();
                    for _ in 0..e {
                        p = p.mul(&b);
                    }
                    p
                });
                t = t.mul(pw);
            }
            acc.push(t);
        }
        acc.iter().fold(C::zero(), |a, b| a.add(b))
    }

    /// Greatest common divisor of the numerators over the lcm of denominators,
    /// signed like the leading coefficient, so `self / content` is primitive
    /// with positive leading coefficient.
    pub fn content(&self) -> Rational {
        use num_bigint::BigInt;
        use num_integer::Integer;
        use num_traits::{One, Zero};
        if self.is_zero() {
            return Rational::one();
        }
        let mut g = BigInt::zero();
        let mut l = BigInt::one();
        for (_, c) in &self.terms {
            g = g.gcd(&c.numer());
            l = l.lcm(&c.denom());
        }
        let mut r = Rational::from_bigints(g, l);
        if self.leading().unwrap().1.is_negative() {
            r = -r;
        }
        r
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{c}*{m:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;
    use proptest::prelude::*;

    fn p(terms: &[(&[(usize, u8)], i64)]) -> Poly {
        Poly::from_terms(terms.iter().map(|(vs, c)| {
            let mut m = Monomial::ONE;
            for &(v, e) in vs.iter() {
                m.set_exp(v, e);
            }
            (m, Rational::from_integer(*c))
        }))
    }

    #[test]
    fn exact_division_roundtrip() {
        // D = v1^2 - v0*v2^2
        let d = p(&[(&[(1, 2)], 1), (&[(0, 1), (2, 2)], -1)]);
        let a = p(&[(&[(0, 3)], 2), (&[(1, 1), (2, 1)], -5), (&[], 7)]);
        let prod = a.mul(&d).mul(&d);
        let q1 = prod.exact_div(&d).unwrap();
        assert_eq!(q1.exact_div(&d).unwrap(), a);
        assert!(a.exact_div(&d).is_none());
    }

    #[test]
    fn content_is_signed_gcd() {
        let a = Poly::from_terms([
            (Monomial::var(0, 1), q(-4, 3)),
            (Monomial::var(1, 1), q(2, 9)),
        ]);
        // v0 is the most significant variable, so the leading coefficient is -4/3
        assert_eq!(a.content(), q(-2, 9));
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        proptest::collection::vec(((0u8..3, 0u8..3, 0u8..2), -5i64..6), 0..6).prop_map(|ts| {
            Poly::from_terms(ts.into_iter().map(|((a, b, c), k)| {
                let mut m = Monomial::ONE;
                m.set_exp(0, a);
                m.set_exp(1, b);
                m.set_exp(3, c);
                (m, Rational::from_integer(k))
            }))
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
            prop_assert!(a.sub(&a).is_zero());
        }

        #[test]
        fn division_inverts_multiplication(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!(a.mul(&b).exact_div(&b), Some(a));
        }
    }
}
