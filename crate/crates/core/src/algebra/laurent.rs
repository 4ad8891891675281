//! Laurent polynomials in `h` with generic coefficients.

use std::collections::BTreeMap;
use std::fmt;

use super::{Coefficient, Rational};

#[derive(Clone, PartialEq)]
pub struct LaurentPoly<C> {
    coeffs: BTreeMap<i32, C>,
}

impl<C: Coefficient> LaurentPoly<C> {
    pub fn zero() -> Self {
        LaurentPoly { coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, C::one())
    }

    pub fn monomial(k: i32, c: C) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        LaurentPoly { coeffs }
    }

    pub fn from_coeffs<I: IntoIterator<Item = (i32, C)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (k, c) in it {
            out.add_term(k, &c);
        }
        out
    }

    fn add_term(&mut self, k: i32, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&k) {
            Some(existing) => {
                let sum = existing.add(c);
                if sum.is_zero() {
                    self.coeffs.remove(&k);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.coeffs.insert(k, c.clone());
            }
        }
    }

    pub fn coeff(&self, k: i32) -> C {
        self.coeffs.get(&k).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(min, max)` exponents, `None` for the zero polynomial.
    pub fn support(&self) -> Option<(i32, i32)> {
        let lo = *self.coeffs.keys().next()?;
        let hi = *self.coeffs.keys().next_back()?;
        Some((lo, hi))
    }

    /// Terms in ascending exponent order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (i32, &C)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_term(*k, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(k, c)| (*k, c.neg())).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                out.add_term(i + j, &a.mul(b));
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|(k, v)| (*k, v.mul(c))))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Applies `f` to every coefficient, dropping results that vanish.
    pub fn map<D: Coefficient, F: FnMut(&C) -> D>(&self, mut f: F) -> LaurentPoly<D> {
        LaurentPoly::from_coeffs(self.coeffs.iter().map(|(k, c)| (*k, f(c))))
    }
}

impl<C: Coefficient + fmt::Display> fmt::Display for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*h")?,
                _ => write!(f, "({c})*h^{k}")?,
            }
        }
        Ok(())
    }
}

impl<C: fmt::Debug> fmt::Debug for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.coeffs.iter()).finish()
    }
}

/// `[h^k] p`.
pub fn laurent_coeff<C: Coefficient>(p: &LaurentPoly<C>, k: i32) -> C {
    p.coeff(k)
}

/// `(a*h + b + c/h)^j`, expanded with trinomial coefficients.
pub fn trinomial_power<C: Coefficient>(a: &C, b: &C, c: &C, j: u32) -> LaurentPoly<C> {
    let pow_table = |x: &C| {
        let mut v = Vec::with_capacity(j as usize + 1);
        v.push(C::one());
        for i in 0..j as usize {
            v.push(v[i].mul(x));
        }
        v
    };
    let (pa, pb, pc) = (pow_table(a), pow_table(b), pow_table(c));
    let mut out = LaurentPoly::zero();
    for i in 0..=j {
        for k in 0..=(j - i) {
            let m = j - i - k;
            let multinomial = Rational::factorial(j)
                / (Rational::factorial(i) * Rational::factorial(k) * Rational::factorial(m));
            let term = pa[i as usize].mul(&pb[m as usize]).mul(&pc[k as usize]).scale(&multinomial);
            out.add_term(i as i32 - k as i32, &term);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Monomial, Poly};
    use proptest::prelude::*;

    const S: usize = 0;
    const R: usize = 1;

    fn generator(j: u32) -> LaurentPoly<Poly> {
        trinomial_power(&Poly::one(), &Poly::var(S), &Poly::var(R), j)
    }

    fn sr(s: u8, r: u8, c: i64) -> Poly {
        let mut m = Monomial::ONE;
        m.set_exp(S, s);
        m.set_exp(R, r);
        Poly::monomial(m, Rational::from_integer(c))
    }

    #[test]
    fn small_coefficients() {
        assert_eq!(generator(2).coeff(0), sr(2, 0, 1).add(&sr(0, 1, 2)));
        assert_eq!(generator(1).coeff(1), Poly::one());
        assert_eq!(generator(1).coeff(-1), sr(0, 1, 1));
        assert_eq!(generator(3).coeff(0), sr(3, 0, 1).add(&sr(1, 1, 6)));
        assert_eq!(generator(0), LaurentPoly::one());
        assert_eq!(generator(2).support(), Some((-2, 2)));
    }

    #[test]
    fn power_agrees_with_repeated_product() {
        let base = generator(1);
        for j in 0..7 {
            assert_eq!(generator(j), base.pow(j));
        }
    }

    #[test]
    fn reflection_multiplies_by_r_power() {
        // [h^p] G = r^p [h^-p] G for G = (h+s+r/h)^J
        for j in 0..=8u32 {
            let g = generator(j);
            for p in -(j as i32)..=(j as i32) {
                if p >= 0 {
                    assert_eq!(g.coeff(-p), g.coeff(p).mul(&sr(0, p as u8, 1)));
                } else {
                    assert_eq!(g.coeff(p), g.coeff(-p).mul(&sr(0, (-p) as u8, 1)));
                }
            }
        }
    }

    fn arb_laurent() -> impl Strategy<Value = LaurentPoly<Rational>> {
        proptest::collection::vec((-3i32..4, -6i64..7), 0..5)
            .prop_map(|ts| LaurentPoly::from_coeffs(ts.into_iter().map(|(k, c)| (k, Rational::from_integer(c)))))
    }

    proptest! {
        #[test]
        fn laurent_ring_axioms(a in arb_laurent(), b in arb_laurent(), c in arb_laurent()) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
        }

        #[test]
        fn trinomial_power_is_multiplicative(j1 in 0u32..5, j2 in 0u32..5) {
            prop_assert_eq!(generator(j1 + j2), generator(j1).mul(&generator(j2)));
        }
    }
}
