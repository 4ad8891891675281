//! Concrete potentials: leading-order series for `u`, `z`, substitution of
//! series into jet expressions, and extraction of map counts.

mod crossmode;
mod potential;
mod series;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{trinomial_power, Rational};
use crate::diffring::{DiffExpr, JetVariable, LogCombo};

pub use crossmode::{direct_order_two, DirectOrderTwo};
pub use potential::{Potential, PotentialParseError};
pub use series::{CouplingSeries, SeriesError, SeriesKey, TExp, MAX_COUPLING};

pub const DEFAULT_ORDER: u32 = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecializeError {
    #[error("leading-order iteration did not stabilize within {0} rounds")]
    NoConvergence(u32),
    #[error("requested {requested} vertices but the series is truncated at {order}")]
    TruncationExceeded { requested: u32, order: u32 },
    #[error("no closed form for genus {0}; available for 0, 1, 2")]
    NoClosedForm(u32),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Solves `[h^0] V'(h + u + z/h) = 0`, `[h^-1] V'(h + u + z/h) = x` for
/// `u = O(t)`, `z = x + O(t)` by fixed-point iteration, each round fixing one
/// more order in the couplings.
pub fn leading_order_series(v: &Potential, order: u32) -> Result<(CouplingSeries, CouplingSeries), SpecializeError> {
    let ord = Some(order);
    let x = CouplingSeries::x().with_order(ord);
    let mut u = CouplingSeries::zero(ord);
    let mut z = x.clone();
    let couplings = v.coupling_series();
    let max_rounds = order + 2;
    for _ in 0..max_rounds {
        let one = CouplingSeries::one_like(&x);
        let powers_base = [(1, one), (0, u.clone()), (-1, z.clone())];
        let mut new_u = CouplingSeries::zero(ord);
        let mut new_z = x.clone();
        for (j, c) in &couplings {
            let y = trinomial_power(&powers_base[0].1, &powers_base[1].1, &powers_base[2].1, (*j - 1) as u32);
            let w = c.scale(&Rational::from(*j));
            new_u = new_u.sub(&y.coeff(0).mul(&w));
            new_z = new_z.sub(&y.coeff(-1).mul(&w));
        }
        if new_u == u && new_z == z {
            return Ok((u, z));
        }
        u = new_u;
        z = new_z;
    }
    Err(SpecializeError::NoConvergence(max_rounds))
}

/// Series for `u`, `z` and their `x`-derivatives, filled on demand.
pub struct JetSeries {
    u: Vec<CouplingSeries>,
    z: Vec<CouplingSeries>,
    x: CouplingSeries,
}

impl JetSeries {
    pub fn new(u: &CouplingSeries, z: &CouplingSeries) -> Self {
        JetSeries { u: vec![u.clone()], z: vec![z.clone()], x: CouplingSeries::x().with_order(z.order()) }
    }

    pub fn jet(&mut self, v: JetVariable) -> CouplingSeries {
        let list = match v.base {
            crate::diffring::Base::U => &mut self.u,
            crate::diffring::Base::Z => &mut self.z,
        };
        while list.len() <= v.order as usize {
            let next = list.last().unwrap().d_x();
            list.push(next);
        }
        list[v.order as usize].clone()
    }

    pub fn var(&mut self, index: usize) -> CouplingSeries {
        match JetVariable::from_index(index) {
            None => self.x.clone(),
            Some(j) => self.jet(j),
        }
    }

    pub fn evaluate(&mut self, e: &DiffExpr) -> Result<CouplingSeries, SpecializeError> {
        let order = self.x.order();
        let mut acc: CouplingSeries = e.numerator().eval(|v| self.var(v));
        for (f, k) in e.denominator_factors() {
            let fv: CouplingSeries = f.eval(|v| self.var(v));
            let inv = fv.with_order(order).inv()?;
            for _ in 0..*k {
                acc = acc.mul(&inv);
            }
        }
        Ok(acc.with_order(order))
    }

    pub fn evaluate_log(&mut self, l: &LogCombo) -> Result<CouplingSeries, SpecializeError> {
        let mut acc = self.evaluate(l.rational_part())?;
        for (c, arg) in l.log_terms() {
            acc = acc.add(&self.evaluate(arg)?.log()?.scale(c));
        }
        Ok(acc)
    }
}

/// Substitutes the series (and their derivatives) into a jet expression.
pub fn evaluate(e: &DiffExpr, u: &CouplingSeries, z: &CouplingSeries) -> Result<CouplingSeries, SpecializeError> {
    JetSeries::new(u, z).evaluate(e)
}

pub fn evaluate_log(l: &LogCombo, u: &CouplingSeries, z: &CouplingSeries) -> Result<CouplingSeries, SpecializeError> {
    JetSeries::new(u, z).evaluate_log(l)
}

/// Map counts per face number for the vertex profile `n_j`: the series
/// coefficient of `prod t_j^(n_j) x^F` rescaled by `prod n_j! / prod (-c_j)^(n_j)`,
/// where `c_j` is the coefficient of `t_j λ^j` in the potential.
pub fn map_count(
    f: &CouplingSeries,
    v: &Potential,
    profile: &TExp,
) -> Result<BTreeMap<i64, Rational>, SpecializeError> {
    if let Some(order) = f.order() {
        if profile.degree() > order {
            return Err(SpecializeError::TruncationExceeded { requested: profile.degree(), order });
        }
    }
    let mut scale = Rational::one();
    for (j, n) in profile.profile() {
        let c = v.scale_of(j).unwrap_or_else(Rational::zero);
        if c.is_zero() {
            return Ok(BTreeMap::new());
        }
        scale = scale * Rational::factorial(n as u32) / (-c).pow(n as i32);
    }
    let mut out = BTreeMap::new();
    for (x_half, c) in f.coefficient_of(profile) {
        assert!(x_half % 2 == 0, "face count must be an integer power of x");
        out.insert((x_half / 2) as i64, c * scale.clone());
    }
    Ok(out)
}

/// `F^(g)` as a coupling series: the double antiderivative of `log(z/x)` for
/// genus 0, the closed forms for genus 1 and 2.
pub fn free_energy_series(v: &Potential, genus: u32, order: u32) -> Result<CouplingSeries, SpecializeError> {
    if genus > 2 {
        return Err(SpecializeError::NoClosedForm(genus));
    }
    let (u, z) = leading_order_series(v, order)?;
    match genus {
        0 => Ok(crate::genfun::f0_series(&u, &z)?),
        1 => evaluate_log(&crate::genfun::f1_closed_form(), &u, &z),
        2 => evaluate(&crate::genfun::f2_closed_form(), &u, &z),
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;
    use crate::diffring::parse_expr;

    fn quartic() -> Potential {
        Potential::parse("0.5*l^2 + t4*l^4").unwrap()
    }

    fn cubic() -> Potential {
        Potential::parse("0.5*l^2 + t3*l^3").unwrap()
    }

    #[test]
    fn quartic_leading_series() {
        let (u, z) = leading_order_series(&quartic(), 4).unwrap();
        assert!(u.is_zero());
        assert_eq!(z.coeff(&TExp::single(4, 1), 4), q(-12, 1));
        assert_eq!(z.coeff(&TExp::single(4, 2), 6), q(288, 1));
        // residual: z + 12 t4 z^2 = x
        let t4 = CouplingSeries::monomial(TExp::single(4, 1), 0, q(12, 1), Some(4));
        let lhs = z.add(&t4.mul(&z).mul(&z));
        assert_eq!(lhs, CouplingSeries::x().with_order(Some(4)));
    }

    #[test]
    fn cubic_leading_series() {
        let (u, z) = leading_order_series(&cubic(), 3).unwrap();
        assert_eq!(u.coeff(&TExp::single(3, 1), 2), q(-6, 1));
        assert_eq!(z.coeff(&TExp::single(3, 2), 4), q(36, 1));
        let t3 = CouplingSeries::monomial(TExp::single(3, 1), 0, q(1, 1), Some(3));
        // u + 3 t3 (u^2 + 2 z) = 0 and z (1 + 6 t3 u) = x
        let r1 = u.add(&t3.scale(&q(3, 1)).mul(&u.mul(&u).add(&z.scale(&q(2, 1)))));
        assert!(r1.is_zero());
        let r2 = z.mul(&CouplingSeries::one_like(&z).add(&t3.scale(&q(6, 1)).mul(&u)));
        assert_eq!(r2, CouplingSeries::x().with_order(Some(3)));
    }

    #[test]
    fn gaussian_is_trivial() {
        let g = Potential::parse("0.5*l^2").unwrap();
        let (u, z) = leading_order_series(&g, 3).unwrap();
        assert!(u.is_zero());
        assert_eq!(z, CouplingSeries::x().with_order(Some(3)));
        let l = crate::diffring::parse_log_combo("log(z/x)").unwrap();
        assert!(evaluate_log(&l, &u, &z).unwrap().is_zero());
    }

    #[test]
    fn derivative_of_quartic_z() {
        let (u, z) = leading_order_series(&quartic(), 3).unwrap();
        let zp = evaluate(&parse_expr("z'").unwrap(), &u, &z).unwrap();
        assert_eq!(zp.coeff(&TExp::default(), 0), q(1, 1));
        assert_eq!(zp.coeff(&TExp::single(4, 1), 2), q(-24, 1));
    }

    #[test]
    fn scaling_exponents() {
        let v = Potential::parse("0.5*l^2 + t3*l^3 + t4*l^4").unwrap();
        let (u, z) = leading_order_series(&v, 5).unwrap();
        for ((t, x), _) in z.terms() {
            // 1 + sum (j/2 - 1) n_j, doubled
            let expected = 2 + t.get(3) as i32 + 2 * t.get(4) as i32;
            assert_eq!(*x, expected);
        }
        for ((t, x), _) in u.terms() {
            let expected = 1 + t.get(3) as i32 + 2 * t.get(4) as i32;
            assert_eq!(*x, expected);
        }
    }
}
