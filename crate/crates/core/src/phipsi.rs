//! The auxiliary functions `phi_m = [h^0] V^(m+1)(h + u + z/h)` and
//! `psi_m = [h^-1] V^(m+1)(h + u + z/h)`, eliminated to explicit rational
//! expressions in the jets through the recurrence
//! `(phi, psi)_{m+1} = D^-1 [[-z u', z'], [z z', -z u']] (phi', psi')_m`
//! with `phi_0 = 0`, `psi_0 = x`.

use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;

use crate::algebra::LaurentPoly;
use crate::diffring::{parse_expr, DiffExpr};
use crate::specialize::{CouplingSeries, Potential};

#[derive(Clone, Debug, PartialEq)]
pub struct PhiPsiPair {
    pub m: u32,
    pub phi: DiffExpr,
    pub psi: DiffExpr,
}

static MEMO: OnceLock<Mutex<Vec<PhiPsiPair>>> = OnceLock::new();

fn step(prev: &PhiPsiPair) -> PhiPsiPair {
    let (dphi, dpsi) = rayon::join(|| prev.phi.d_x(), || prev.psi.d_x());
    let d = DiffExpr::discriminant();
    let zu = parse_expr("z*u'").unwrap();
    let zp = parse_expr("z'").unwrap();
    let zzp = parse_expr("z*z'").unwrap();
    let (phi, psi) = rayon::join(
        || DiffExpr::sum([zu.mul(&dphi).neg(), zp.mul(&dpsi)].iter()).div(&d),
        || DiffExpr::sum([zzp.mul(&dphi), zu.mul(&dpsi).neg()].iter()).div(&d),
    );
    PhiPsiPair { m: prev.m + 1, phi, psi }
}

/// `(phi_m, psi_m)`, memoized for the life of the process.
pub fn phi_psi(m: u32) -> PhiPsiPair {
    let memo = MEMO.get_or_init(|| {
        Mutex::new(vec![PhiPsiPair { m: 0, phi: DiffExpr::zero(), psi: DiffExpr::x() }])
    });
    let mut table = memo.lock().unwrap();
    while table.len() <= m as usize {
        let next = step(table.last().unwrap());
        table.push(next);
    }
    table[m as usize].clone()
}

/// `z' phi_m + u' psi_m = psi_{m-1}'` and `z u' phi_m + z' psi_m = z phi_{m-1}'`.
pub fn check_unwinding(m: u32) -> bool {
    assert!(m >= 1, "unwinding identities start at m = 1");
    let cur = phi_psi(m);
    let prev = phi_psi(m - 1);
    let e = |s: &str| parse_expr(s).unwrap();
    let first = e("z'").mul(&cur.phi).add(&e("u'").mul(&cur.psi));
    let second = e("z*u'").mul(&cur.phi).add(&e("z'").mul(&cur.psi));
    let (a, b) = rayon::join(|| first == prev.psi.d_x(), || second == e("z").mul(&prev.phi.d_x()));
    a && b
}

/// Checks unwinding for every `m` in `1..=max_m` in parallel.
pub fn check_unwinding_up_to(max_m: u32) -> Vec<(u32, bool)> {
    phi_psi(max_m);
    (1..=max_m).into_par_iter().map(|m| (m, check_unwinding(m))).collect()
}

/// `phi_m`, `psi_m` computed directly from a concrete potential and series
/// for `u`, `z`.
pub fn phi_psi_explicit(
    v: &Potential,
    m: u32,
    u: &CouplingSeries,
    z: &CouplingSeries,
) -> (CouplingSeries, CouplingSeries) {
    let deriv = v.derivative_coefficients(m + 1);
    let y = LaurentPoly::from_coeffs([(1, CouplingSeries::one_like(u)), (0, u.clone()), (-1, z.clone())]);
    let mut phi = CouplingSeries::zero_like(u);
    let mut psi = CouplingSeries::zero_like(u);
    let mut power = LaurentPoly::monomial(0, CouplingSeries::one_like(u));
    for (k, c) in deriv.iter().enumerate() {
        if k > 0 {
            power = power.mul(&y);
        }
        if c.is_zero() {
            continue;
        }
        phi = phi.add(&power.coeff(0).mul(c));
        psi = psi.add(&power.coeff(-1).mul(c));
    }
    (phi, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffring::{diff_weight, Grade};
    use crate::algebra::Rational;

    #[test]
    fn first_pairs() {
        let p0 = phi_psi(0);
        assert!(p0.phi.is_zero());
        assert_eq!(p0.psi, DiffExpr::x());
        let p1 = phi_psi(1);
        assert_eq!(p1.phi, parse_expr("z'/((z')^2 - z*(u')^2)").unwrap());
        assert_eq!(p1.psi, parse_expr("-z*u'/((z')^2 - z*(u')^2)").unwrap());
    }

    #[test]
    fn unwinding_small_m() {
        for m in 1..=3 {
            assert!(check_unwinding(m), "m = {m}");
        }
    }

    #[test]
    fn weights_and_denominators() {
        let d = DiffExpr::discriminant();
        for m in 1..=4 {
            let p = phi_psi(m);
            assert_eq!(diff_weight(&p.phi), Grade::Homogeneous(Rational::from_integer(-1)));
            assert_eq!(diff_weight(&p.psi), Grade::Homogeneous(Rational::from_integer(-1)));
            assert!(p.phi.denominator_divides(d.numerator(), 2 * m - 1));
            assert!(p.psi.denominator_divides(d.numerator(), 2 * m - 1));
        }
    }
}
