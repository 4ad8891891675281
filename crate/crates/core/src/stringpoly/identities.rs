//! Coefficient identities for `G(h + s + r/h)` and `G(√r h + s + √r/h)`,
//! checked on the power family `G(y) = y^q`.
//!
//! Reflection holds in the form `[h^-p] G(h + s + r/h) = r^p [h^p] G(...)`,
//! equivalently `[h^p] G(h + s + r/h) = r^(-p/2) [h^p] G(√r h + s + √r/h)`.

use crate::algebra::{trinomial_power, LaurentPoly, Rational};

use super::SrPoly;

fn one() -> SrPoly {
    SrPoly::constant(Rational::one())
}

fn sqrt_r() -> SrPoly {
    SrPoly::monomial(0, 1, Rational::one())
}

/// `(h + s + r/h)^q`.
pub fn monic_power(q: u32) -> LaurentPoly<SrPoly> {
    trinomial_power(&one(), &SrPoly::s(), &SrPoly::r(), q)
}

/// `(√r h + s + √r/h)^q`.
pub fn normalized_power(q: u32) -> LaurentPoly<SrPoly> {
    trinomial_power(&sqrt_r(), &SrPoly::s(), &sqrt_r(), q)
}

pub fn reflection_holds(max_q: u32) -> bool {
    (0..=max_q).all(|q| {
        let m = monic_power(q);
        let n = normalized_power(q);
        (-(q as i32) - 1..=q as i32 + 1).all(|p| {
            m.coeff(-p) == m.coeff(p).mul_r_half(2 * p)
                && m.coeff(p) == n.coeff(p).mul_r_half(-p)
                && n.coeff(p) == n.coeff(-p)
        })
    })
}

/// `d_s [h^p]N = r^(p/2) d_r r^(1/2-p/2) [h^(p-1)]N` and the raising
/// counterpart `d_s [h^p]N = r^(-p/2) d_r r^(p/2+1/2) [h^(p+1)]N`.
pub fn raising_lowering_hold(max_q: u32) -> bool {
    (0..=max_q).all(|q| {
        let n = normalized_power(q);
        (-(q as i32) - 1..=q as i32 + 1).all(|p| {
            let lhs = n.coeff(p).d_s();
            let lower = n.coeff(p - 1).mul_r_half(1 - p).d_r().mul_r_half(p);
            let raise = n.coeff(p + 1).mul_r_half(p + 1).d_r().mul_r_half(-p);
            lhs == lower && lhs == raise
        })
    })
}

/// `d_s^|p| [h^p]N = r^(|p|/2) d_r^|p| [h^0]N`.
pub fn zeroing_holds(max_q: u32) -> bool {
    (0..=max_q).all(|q| {
        let n = normalized_power(q);
        let base = n.coeff(0);
        (-(q as i32)..=q as i32).all(|p| {
            let k = p.unsigned_abs();
            n.coeff(p).d_s_n(k) == base.d_r_n(k).mul_r_half(k as i32)
        })
    })
}

/// `r d_r^2 [h^0]N = (d_s^2 - d_r) [h^0]N`.
pub fn derivative_swap_holds(max_q: u32) -> bool {
    (0..=max_q).all(|q| {
        let g = normalized_power(q).coeff(0);
        g.d_r_n(2).mul_r_half(2) == g.d_s_n(2).sub(&g.d_r())
    })
}

/// `√r d_s [h^p](h - 1/h) N^q = p [h^p] N^q`, where the derivative acts on
/// the whole coefficient.
pub fn integration_by_parts_holds(max_q: u32) -> bool {
    let h_minus = LaurentPoly::from_coeffs([(1, one()), (-1, one().neg())]);
    (0..=max_q).all(|q| {
        let n = normalized_power(q);
        let lhs_poly = h_minus.mul(&n);
        (-(q as i32) - 1..=q as i32 + 1).all(|p| {
            let lhs = lhs_poly.coeff(p).d_s().mul_r_half(1);
            lhs == n.coeff(p).scale(&Rational::from_integer(p as i64))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold_on_small_powers() {
        assert!(reflection_holds(6));
        assert!(raising_lowering_hold(6));
        assert!(zeroing_holds(6));
        assert!(derivative_swap_holds(6));
        assert!(integration_by_parts_holds(6));
    }

    #[test]
    fn printed_reflection_fails() {
        // [h^1](h+s+r/h) = 1 but r [h^-1](h+s+r/h) = r^2
        let m = monic_power(1);
        assert_ne!(m.coeff(1), m.coeff(-1).mul_r_half(2));
    }
}
