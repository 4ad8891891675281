//! Direct `N^-2` expansion of the discrete string equations for a concrete
//! potential, independent of the string operators and the genus solver.

use super::{leading_order_series, CouplingSeries, Potential, SpecializeError};
use crate::algebra::{Coefficient, Rational};
use crate::diffring::{Base, JetVariable};
use crate::motzkin::path_sum;

/// `a_0 + a_1 eps + a_2 eps^2`, truncated above `eps^2`.
#[derive(Clone, Debug, PartialEq)]
struct Eps([CouplingSeries; 3]);

impl Eps {
    fn lift(c: CouplingSeries) -> Self {
        Eps([c, CouplingSeries::zero(None), CouplingSeries::zero(None)])
    }

    fn d_x(&self) -> Self {
        Eps([self.0[0].d_x(), self.0[1].d_x(), self.0[2].d_x()])
    }
}

impl Coefficient for Eps {
    fn zero() -> Self {
        Eps::lift(CouplingSeries::zero(None))
    }
    fn one() -> Self {
        Eps::lift(CouplingSeries::constant(Rational::one()))
    }
    fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
    fn add(&self, other: &Self) -> Self {
        Eps([self.0[0].add(&other.0[0]), self.0[1].add(&other.0[1]), self.0[2].add(&other.0[2])])
    }
    fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        Eps([
            a[0].mul(&b[0]),
            a[0].mul(&b[1]).add(&a[1].mul(&b[0])),
            a[0].mul(&b[2]).add(&a[1].mul(&b[1])).add(&a[2].mul(&b[0])),
        ])
    }
    fn neg(&self) -> Self {
        Eps([self.0[0].neg(), self.0[1].neg(), self.0[2].neg()])
    }
    fn from_rational(c: &Rational) -> Self {
        Eps::lift(CouplingSeries::constant(c.clone()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectOrderTwo {
    pub z1: CouplingSeries,
    pub u2: CouplingSeries,
    /// `eps^1` parts of both equations with `u_1 = u'/2`; zero when the
    /// half-shift ansatz is consistent.
    pub order_one_residuals: (CouplingSeries, CouplingSeries),
}

/// The `eps^k` parts of `[h^0] V'(L)` and `[h^-1] V'(L) - x` for
/// `s = u + eps u'/2 + eps^2 u2`, `r = z + eps^2 z1`.
fn residuals(v: &Potential, u: &CouplingSeries, z: &CouplingSeries, u2: &CouplingSeries, z1: &CouplingSeries) -> (Eps, Eps) {
    let order = z.order();
    let half = Rational::new(1, 2);
    let s = Eps([u.clone(), u.d_x().scale(&half), u2.clone()]);
    let r = Eps([z.clone(), CouplingSeries::zero(order), z1.clone()]);
    let mut s_jets = vec![s];
    let mut r_jets = vec![r];
    for _ in 0..2 {
        s_jets.push(s_jets.last().unwrap().d_x());
        r_jets.push(r_jets.last().unwrap().d_x());
    }
    let image = |idx: usize| -> Eps {
        match JetVariable::from_index(idx) {
            None => Eps::lift(CouplingSeries::x()),
            Some(j) => match j.base {
                Base::U => s_jets[j.order as usize].clone(),
                Base::Z => r_jets[j.order as usize].clone(),
            },
        }
    };
    let coeffs = v.derivative_coefficients(1);
    let mut eq_a = <Eps as Coefficient>::zero();
    let mut eq_b = Eps::lift(CouplingSeries::x().neg());
    for (p, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (end, eq) in [(0, &mut eq_a), (-1, &mut eq_b)] {
            let sum = path_sum(p as u32, end, 2);
            let mut total = <Eps as Coefficient>::zero();
            for k in 0..=2 {
                let val: Eps = sum.grade_poly(k).eval(image);
                // shift grade k up by eps^k
                let mut shifted = <Eps as Coefficient>::zero();
                for i in 0..=(2 - k) {
                    shifted.0[i + k] = val.0[i].clone();
                }
                total = total.add(&shifted);
            }
            *eq = eq.add(&Eps([total.0[0].mul(c), total.0[1].mul(c), total.0[2].mul(c)]));
        }
    }
    let trunc = |e: Eps| Eps(e.0.map(|c| c.with_order(order)));
    (trunc(eq_a), trunc(eq_b))
}

/// Solves the `eps^2` equations for `z1` and `u2` as coupling series.
pub fn direct_order_two(v: &Potential, order: u32) -> Result<DirectOrderTwo, SpecializeError> {
    let (u, z) = leading_order_series(v, order)?;
    let zero = CouplingSeries::zero(Some(order));
    let one = CouplingSeries::one_like(&zero);
    let (a0, b0) = residuals(v, &u, &z, &zero, &zero);
    let (a_u, b_u) = residuals(v, &u, &z, &one, &zero);
    let (a_z, b_z) = residuals(v, &u, &z, &zero, &one);
    let ca = a0.0[2].clone();
    let cb = b0.0[2].clone();
    let (alpha_a, beta_a) = (a_u.0[2].sub(&ca), a_z.0[2].sub(&ca));
    let (alpha_b, beta_b) = (b_u.0[2].sub(&cb), b_z.0[2].sub(&cb));
    // alpha u2 + beta z1 = -c for each equation
    let det_inv = alpha_a.mul(&beta_b).sub(&beta_a.mul(&alpha_b)).inv()?;
    let u2 = beta_a.mul(&cb).sub(&beta_b.mul(&ca)).mul(&det_inv);
    let z1 = alpha_b.mul(&ca).sub(&alpha_a.mul(&cb)).mul(&det_inv);
    Ok(DirectOrderTwo { z1, u2, order_one_residuals: (a0.0[1].clone(), b0.0[1].clone()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_zero_and_one_vanish() {
        let v = Potential::parse("0.5*l^2 + t3*l^3 + t4*l^4").unwrap();
        let (u, z) = leading_order_series(&v, 3).unwrap();
        let zero = CouplingSeries::zero(Some(3));
        let (a, b) = residuals(&v, &u, &z, &zero, &zero);
        assert!(a.0[0].is_zero());
        assert!(b.0[0].is_zero());
        assert!(a.0[1].is_zero());
        assert!(b.0[1].is_zero());
    }

    #[test]
    fn gaussian_has_no_corrections() {
        let v = Potential::parse("0.5*l^2").unwrap();
        let d = direct_order_two(&v, 2).unwrap();
        assert!(d.z1.is_zero());
        assert!(d.u2.is_zero());
    }
}
