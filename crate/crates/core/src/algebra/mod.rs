//! Exact arithmetic: rationals, sparse polynomials, Laurent polynomials in the
//! spectral variable `h`, and small dense linear algebra.

mod laurent;
pub mod linalg;
mod poly;
mod rational;

use std::fmt::Debug;

pub use laurent::{laurent_coeff, trinomial_power, LaurentPoly};
pub use poly::{Monomial, Poly, MAX_VARS};
pub use rational::{q, ParseRationalError, Rational};

/// The ring interface shared by every coefficient type that can sit inside a
/// [`LaurentPoly`].
pub trait Coefficient: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(c: &Rational) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn scale(&self, c: &Rational) -> Self {
        self.mul(&Self::from_rational(c))
    }
}

impl Coefficient for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(c: &Rational) -> Self {
        c.clone()
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }
}

impl Coefficient for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::one()
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        Poly::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Poly::mul(self, other)
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
    fn from_rational(c: &Rational) -> Self {
        Poly::constant(c.clone())
    }
    fn scale(&self, c: &Rational) -> Self {
        Poly::scale(self, c)
    }
}
