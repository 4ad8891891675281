//! Genus expansion of the free energy: `d_x^2 F^(g)` from the cumulants of
//! `log r`, and closed forms for genus one and two.

use std::fmt::Write as _;
use std::sync::OnceLock;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::Rational;
use crate::diffring::{parse_expr, parse_log_combo, DiffExpr, LogCombo};
use crate::specialize::{CouplingSeries, SeriesError, TExp};

/// Bernoulli numbers with `B_1 = -1/2`.
pub fn bernoulli(n: u32) -> Rational {
    let mut b = vec![Rational::one()];
    for m in 1..=n {
        let mut acc = Rational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc = acc + Rational::binomial(m + 1, k as u32) * bk.clone();
        }
        b.push(-acc / Rational::from_integer(m as i64 + 1));
    }
    b.pop().unwrap()
}

/// `[delta^g] log(z + z_1 delta + z_2 delta^2 + ...) / x`, given
/// `z_list = [z_1, ..., z_g]`. Genus zero gives `log(z/x)`.
pub fn cumulant(g: usize, z_list: &[DiffExpr]) -> LogCombo {
    let z = parse_expr("z").unwrap();
    if g == 0 {
        return LogCombo::log(Rational::one(), z.div(&DiffExpr::x())).unwrap();
    }
    assert!(z_list.len() >= g, "need z_1..z_{g}");
    // w = sum z_k/z delta^k, truncated at delta^g
    let w: Vec<DiffExpr> = std::iter::once(DiffExpr::zero())
        .chain(z_list[..g].iter().map(|zk| zk.div(&z)))
        .collect();
    let mut power = w.clone();
    let mut total = DiffExpr::zero();
    for n in 1..=g {
        if n > 1 {
            power = truncated_mul(&power, &w, g);
        }
        let sign = if n % 2 == 1 { 1 } else { -1 };
        total = total.add(&power[g].scale(&Rational::new(sign, n as i64)));
    }
    LogCombo::from_expr(total)
}

fn truncated_mul(a: &[DiffExpr], b: &[DiffExpr], g: usize) -> Vec<DiffExpr> {
    (0..=g)
        .map(|k| DiffExpr::sum((0..=k).map(|i| a[i].mul(&b[k - i])).collect::<Vec<_>>().iter()))
        .collect()
}

/// `sum_m (1 - 2m) B_2m / (2m)! d_x^2m cumulant_{g-m}`, which equals
/// `d_x^2 F^(g)`.
pub fn free_energy_relation(g: usize, z_list: &[DiffExpr]) -> LogCombo {
    let mut total = LogCombo::zero();
    for m in 0..=g {
        let c = Rational::from_integer(1 - 2 * m as i64) * bernoulli(2 * m as u32)
            / Rational::factorial(2 * m as u32);
        if c.is_zero() {
            continue;
        }
        total = total.add(&cumulant(g - m, z_list).d_x_n(2 * m as u32).scale(&c));
    }
    total
}

/// `F^(1) = (1/24) log D - (1/12) log(z/x)`.
pub fn f1_closed_form() -> LogCombo {
    parse_log_combo("1/24*log((z')^2 - z*(u')^2) - 1/12*log(z/x)").unwrap()
}

const F2_BRACKET: &str = "-24*(z')^10 + 96*z*(u')^2*(z')^8 + 24*z*z''*(z')^8 - 8*z^2*z^(3)*(z')^7 \
- 144*z^2*(u')^4*(z')^6 - 84*z^3*(u'')^2*(z')^6 + 6*z^2*(z'')^2*(z')^6 - 96*z^2*(u')^2*z''*(z')^6 \
- 120*z^3*u'*u^(3)*(z')^6 + 20*z^3*z^(4)*(z')^6 - 384*z^3*(u')^3*u''*(z')^5 + 384*z^3*u'*u''*z''*(z')^5 \
- 84*z^4*u''*u^(3)*(z')^5 + 172*z^3*(u')^2*z^(3)*(z')^5 - 84*z^3*z''*z^(3)*(z')^5 - 40*z^4*u'*u^(4)*(z')^5 \
+ 15*z^3*(u')^6*(z')^4 + 64*z^3*(z'')^3*(z')^4 - 638*z^4*(u')^2*(u'')^2*(z')^4 \
- 340*z^3*(u')^2*(z'')^2*(z')^4 + 451*z^3*(u')^4*z''*(z')^4 + 192*z^4*(u'')^2*z''*(z')^4 \
+ 48*z^4*(u')^3*u^(3)*(z')^4 + 252*z^4*u'*z''*u^(3)*(z')^4 + 252*z^4*u'*u''*z^(3)*(z')^4 \
- 20*z^4*(u')^2*z^(4)*(z')^4 - 256*z^5*u'*(u'')^3*(z')^3 - 768*z^4*u'*u''*(z'')^2*(z')^3 \
+ 1152*z^4*(u')^3*u''*z''*(z')^3 - 168*z^5*(u')^2*u''*u^(3)*(z')^3 - 152*z^4*(u')^4*z^(3)*(z')^3 \
- 168*z^4*(u')^2*z''*z^(3)*(z')^3 + 80*z^5*(u')^3*u^(4)*(z')^3 - 7*z^4*(u')^8*(z')^2 \
+ 384*z^4*(u')^2*(z'')^3*(z')^2 - 68*z^5*(u')^4*(u'')^2*(z')^2 - 430*z^4*(u')^4*(z'')^2*(z')^2 \
- 2*z^4*(u')^6*z''*(z')^2 + 1152*z^5*(u')^2*(u'')^2*z''*(z')^2 + 96*z^5*(u')^5*u^(3)*(z')^2 \
- 168*z^5*(u')^3*z''*u^(3)*(z')^2 - 168*z^5*(u')^3*u''*z^(3)*(z')^2 - 20*z^5*(u')^4*z^(4)*(z')^2 \
- 256*z^6*(u')^3*(u'')^3*z' - 768*z^5*(u')^3*u''*(z'')^2*z' + 252*z^6*(u')^4*u''*u^(3)*z' \
- 12*z^5*(u')^6*z^(3)*z' + 252*z^5*(u')^4*z''*z^(3)*z' - 40*z^6*(u')^5*u^(4)*z' \
+ 64*z^5*(u')^4*(z'')^3 + 22*z^6*(u')^6*(u'')^2 - 4*z^5*(u')^6*(z'')^2 + 7*z^5*(u')^8*z'' \
+ 192*z^6*(u')^4*(u'')^2*z'' - 24*z^6*(u')^7*u^(3) - 84*z^6*(u')^5*z''*u^(3) \
- 84*z^6*(u')^5*u''*z^(3) + 20*z^6*(u')^6*z^(4)";

/// `F^(2) = 1/(240 x^2) + B / (5760 z^2 (z u'^2 - z'^2)^4)` with the 58-term
/// bracket `B`.
pub fn f2_closed_form() -> DiffExpr {
    static F2: OnceLock<DiffExpr> = OnceLock::new();
    F2.get_or_init(|| {
        let bracket = parse_expr(F2_BRACKET).unwrap();
        let den = parse_expr("5760*z^2*(z*(u')^2 - (z')^2)^4").unwrap();
        parse_expr("1/(240*x^2)").unwrap().add(&bracket.div(&den))
    })
    .clone()
}

pub fn closed_form(g: usize) -> Option<LogCombo> {
    match g {
        1 => Some(f1_closed_form()),
        2 => Some(LogCombo::from_expr(f2_closed_form())),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub genus: usize,
    pub lhs_hash: String,
    pub rhs_hash: String,
    pub equal: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> Value {
        json!({
            "genus": self.genus,
            "lhs_hash": self.lhs_hash,
            "rhs_hash": self.rhs_hash,
            "equal": self.equal,
        })
    }
}

fn hash_text(s: &str) -> String {
    let digest = Sha256::digest(s.as_bytes());
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        write!(out, "{b:02x}").unwrap();
    }
    out
}

/// Compares `d_x^2 closed` with the cumulant relation built from `z_list`.
pub fn verify_closed_form(g: usize, closed: &LogCombo, z_list: &[DiffExpr]) -> VerificationReport {
    let (lhs, rhs) = rayon::join(|| closed.d_x_n(2), || free_energy_relation(g, z_list));
    let equal = lhs.sub(&rhs).is_zero();
    VerificationReport { genus: g, lhs_hash: hash_text(&lhs.to_string()), rhs_hash: hash_text(&rhs.to_string()), equal }
}

/// `F^(0)` as the termwise double antiderivative of `log(z/x)`.
pub fn f0_series(_u: &CouplingSeries, z: &CouplingSeries) -> Result<CouplingSeries, SeriesError> {
    let x_inv = CouplingSeries::monomial(TExp::default(), -2, Rational::one(), z.order());
    z.mul(&x_inv).log()?.double_antiderivative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;
    use crate::diffring::{diff_weight, Grade};

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), q(1, 1));
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(3), q(0, 1));
        assert_eq!(bernoulli(4), q(-1, 30));
        assert_eq!(bernoulli(6), q(1, 42));
    }

    #[test]
    fn relation_coefficients() {
        // genus two: z~_2 - (1/12) z~_1'' + (1/240) log(z/x)''''
        let z1 = parse_expr("u'").unwrap();
        let z2 = parse_expr("z''").unwrap();
        let rel = free_energy_relation(2, &[z1.clone(), z2.clone()]);
        let z = parse_expr("z").unwrap();
        let c2 = z2.div(&z).sub(&z1.mul(&z1).div(&z.mul(&z)).scale(&q(1, 2)));
        let expected = LogCombo::from_expr(c2)
            .sub(&LogCombo::from_expr(z1.div(&z)).d_x_n(2).scale(&q(1, 12)))
            .add(&cumulant(0, &[]).d_x_n(4).scale(&q(1, 240)));
        assert!(rel.sub(&expected).is_zero());
    }

    #[test]
    fn f2_is_homogeneous() {
        let f2 = f2_closed_form();
        assert_eq!(diff_weight(&f2), Grade::Homogeneous(q(2, 1)));
        assert_eq!(f2.denominator_exponent(&crate::diffring::discriminant_poly()), 4);
    }

    #[test]
    fn bracket_has_58_terms() {
        assert_eq!(parse_expr(F2_BRACKET).unwrap().numerator().len(), 58);
    }

    #[test]
    fn hashes_are_hex() {
        let h = hash_text("abc");
        assert_eq!(h, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
