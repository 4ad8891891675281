//! Reduced rational functions in the differential ring.
//!
//! The denominator is kept factored into primitive polynomials. Cancellation
//! is done by trial exact division against those factors, which is all the
//! rational-function reduction this ring needs: every denominator produced
//! by the solver is a product of jet variables, `x` and `D`.

use std::fmt;

use crate::algebra::{Coefficient, Poly, Rational};

use super::{d_poly, discriminant_poly, poly_text, Names};

#[derive(Clone)]
pub struct DiffExpr {
    num: Poly,
    /// Primitive factors with positive exponents, sorted, no duplicates.
    den: Vec<(Poly, u32)>,
}

impl DiffExpr {
    pub fn zero() -> Self {
        DiffExpr { num: Poly::zero(), den: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        DiffExpr { num: Poly::constant(c), den: Vec::new() }
    }

    pub fn from_poly(p: Poly) -> Self {
        DiffExpr { num: p, den: Vec::new() }
    }

    pub fn var(index: usize) -> Self {
        Self::from_poly(Poly::var(index))
    }

    pub fn x() -> Self {
        Self::var(super::X)
    }

    pub fn jet(v: super::JetVariable) -> Self {
        Self::var(v.index())
    }

    /// `D = (z')^2 - z (u')^2`.
    pub fn discriminant() -> Self {
        Self::from_poly(discriminant_poly())
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn denominator(&self) -> Poly {
        self.den.iter().fold(Poly::one(), |acc, (f, e)| acc.mul(&f.pow(*e)))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.den.is_empty() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn neg(&self) -> Self {
        DiffExpr { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        DiffExpr { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return DiffExpr { num: self.num.add(&other.num), den: self.den.clone() }.reduced();
        }
        let (l, fa, fb) = lcm_cofactors(&self.den, &other.den);
        let num = self.num.mul(&fa).add(&other.num.mul(&fb));
        DiffExpr { num, den: l }.reduced()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let num = self.num.mul(&other.num);
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            push_factor(&mut den, f.clone(), *e);
        }
        // only factors of one side can cancel against the other's numerator
        DiffExpr { num, den }.reduced()
    }

    /// `None` when dividing by zero.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        Some(self.mul(&other.recip_unchecked()))
    }

    pub fn div(&self, other: &Self) -> Self {
        self.checked_div(other).expect("division by zero expression")
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip_unchecked())
        }
    }

    fn recip_unchecked(&self) -> Self {
        let mut num = Poly::one();
        for (f, e) in &self.den {
            num = num.mul(&f.pow(*e));
        }
        let known: Vec<Poly> = self.den.iter().map(|(f, _)| f.clone()).collect();
        let (c, den) = factor_denominator(&self.num, &known);
        DiffExpr { num: num.scale(&c.recip()), den }
    }

    pub fn pow(&self, e: i32) -> Self {
        let base = if e < 0 { self.recip().expect("negative power of zero") } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Total derivative in `x`.
    pub fn d_x(&self) -> Self {
        if self.den.is_empty() {
            return Self::from_poly(d_poly(&self.num));
        }
        // (N / prod f^e)' = (N' prod f - N sum e f' prod_{j != i} f) / prod f^(e+1)
        let fs: Vec<&Poly> = self.den.iter().map(|(f, _)| f).collect();
        let prod_all = fs.iter().fold(Poly::one(), |acc, f| acc.mul(f));
        let mut num = d_poly(&self.num).mul(&prod_all);
        for (i, (f, e)) in self.den.iter().enumerate() {
            let others = fs.iter().enumerate().filter(|(j, _)| *j != i).fold(Poly::one(), |acc, (_, g)| acc.mul(g));
            let t = self.num.mul(&d_poly(f)).mul(&others).scale(&Rational::from(*e));
            num = num.sub(&t);
        }
        let den = self.den.iter().map(|(f, e)| (f.clone(), e + 1)).collect();
        DiffExpr { num, den }.reduced()
    }

    pub fn d_x_n(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |acc, _| acc.d_x())
    }

    /// Sums many expressions with a single common-denominator pass.
    pub fn sum<'a, I: IntoIterator<Item = &'a DiffExpr>>(items: I) -> Self {
        let mut groups: Vec<(Vec<(Poly, u32)>, Poly)> = Vec::new();
        for e in items {
            if e.is_zero() {
                continue;
            }
            match groups.iter_mut().find(|(d, _)| *d == e.den) {
                Some((_, n)) => *n = n.add(&e.num),
                None => groups.push((e.den.clone(), e.num.clone())),
            }
        }
        let mut lcm: Vec<(Poly, u32)> = Vec::new();
        for (d, _) in &groups {
            for (f, e) in d {
                match lcm.iter_mut().find(|(g, _)| g == f) {
                    Some((_, k)) => *k = (*k).max(*e),
                    None => lcm.push((f.clone(), *e)),
                }
            }
        }
        lcm.sort();
        let mut num = Poly::zero();
        for (d, n) in &groups {
            let cof = cofactor(&lcm, d);
            num = num.add(&n.mul(&cof));
        }
        DiffExpr { num, den: lcm }.reduced()
    }

    /// Substitutes every variable by an expression and re-simplifies.
    pub fn substitute<F: FnMut(usize) -> DiffExpr>(&self, mut image: F) -> Self {
        let num: DiffExpr = self.num.eval(&mut image);
        let den: DiffExpr = self.denominator().eval(&mut image);
        num.div(&den)
    }

    /// True if the denominator is, up to a constant, a power of `base` with
    /// exponent at most `max_exp`.
    pub fn denominator_divides(&self, base: &Poly, max_exp: u32) -> bool {
        let (_, b) = normalize_factor(base);
        self.den.iter().all(|(f, e)| *f == b && *e <= max_exp)
    }

    /// Largest exponent of `base` in the denominator.
    pub fn denominator_exponent(&self, base: &Poly) -> u32 {
        let (_, b) = normalize_factor(base);
        self.den.iter().filter(|(f, _)| *f == b).map(|(_, e)| *e).sum()
    }

    fn reduced(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        for (f, e) in self.den.iter_mut() {
            if f.len() == 1 {
                // monomial factors are single variables
                let (m, _) = &f.terms()[0];
                let (v, _) = m.factors().next().expect("constant denominator factor");
                let k = (*e as u8).min(self.num.min_exp(v));
                if k > 0 {
                    self.num = self.num.div_var_pow(v, k);
                    *e -= k as u32;
                }
            } else {
                while *e > 0 {
                    match self.num.exact_div(f) {
                        Some(q) => {
                            self.num = q;
                            *e -= 1;
                        }
                        None => break,
                    }
                }
            }
        }
        self.den.retain(|(_, e)| *e > 0);
        self
    }

    pub fn display_with(&self, names: Names) -> ExprDisplay<'_> {
        ExprDisplay { expr: self, names }
    }
}

fn push_factor(den: &mut Vec<(Poly, u32)>, f: Poly, e: u32) {
    match den.iter_mut().find(|(g, _)| *g == f) {
        Some((_, k)) => *k += e,
        None => {
            den.push((f, e));
            den.sort();
        }
    }
}

fn cofactor(lcm: &[(Poly, u32)], d: &[(Poly, u32)]) -> Poly {
    let mut out = Poly::one();
    for (f, e) in lcm {
        let have = d.iter().find(|(g, _)| g == f).map_or(0, |(_, k)| *k);
        if *e > have {
            out = out.mul(&f.pow(e - have));
        }
    }
    out
}

fn lcm_cofactors(a: &[(Poly, u32)], b: &[(Poly, u32)]) -> (Vec<(Poly, u32)>, Poly, Poly) {
    let mut l: Vec<(Poly, u32)> = a.to_vec();
    for (f, e) in b {
        match l.iter_mut().find(|(g, _)| g == f) {
            Some((_, k)) => *k = (*k).max(*e),
            None => l.push((f.clone(), *e)),
        }
    }
    l.sort();
    let fa = cofactor(&l, a);
    let fb = cofactor(&l, b);
    (l, fa, fb)
}

/// Splits `p` into `content * prod factors^e`, reusing `known` factors (and
/// `D`) where they divide.
fn factor_denominator(p: &Poly, known: &[Poly]) -> (Rational, Vec<(Poly, u32)>) {
    let mut rest = p.clone();
    let mut den: Vec<(Poly, u32)> = Vec::new();
    for v in 0..crate::algebra::MAX_VARS {
        let k = rest.min_exp(v);
        if k > 0 {
            rest = rest.div_var_pow(v, k);
            push_factor(&mut den, Poly::var(v), k as u32);
        }
    }
    if rest.is_constant() {
        return (rest.constant_value().unwrap(), den);
    }
    let mut candidates: Vec<Poly> = known.iter().filter(|f| f.len() > 1).cloned().collect();
    let (_, d) = normalize_factor(&discriminant_poly());
    if !candidates.contains(&d) {
        candidates.push(d);
    }
    for f in candidates {
        let mut e = 0;
        while rest.len() >= f.len() {
            match rest.exact_div(&f) {
                Some(q) => {
                    rest = q;
                    e += 1;
                }
                None => break,
            }
        }
        if e > 0 {
            push_factor(&mut den, f, e);
        }
        if rest.is_constant() {
            break;
        }
    }
    if rest.is_constant() {
        return (rest.constant_value().unwrap(), den);
    }
    let (c, f) = normalize_factor(&rest);
    push_factor(&mut den, f, 1);
    (c, den)
}

/// `p = c * f` with `f` primitive and positive leading coefficient.
fn normalize_factor(p: &Poly) -> (Rational, Poly) {
    let c = p.content();
    (c.clone(), p.scale(&c.recip()))
}

impl PartialEq for DiffExpr {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        let (_, fa, fb) = lcm_cofactors(&self.den, &other.den);
        self.num.mul(&fa) == other.num.mul(&fb)
    }
}

impl fmt::Debug for DiffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(Names::UZ))
    }
}

impl fmt::Display for DiffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(Names::UZ))
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a DiffExpr,
    names: Names,
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.expr;
        let num = poly_text(&e.num, self.names);
        if e.den.is_empty() {
            return write!(f, "{num}");
        }
        let num = if e.num.len() > 1 { format!("({num})") } else { num };
        let mut parts = Vec::new();
        for (p, k) in &e.den {
            let t = poly_text(p, self.names);
            let t = if p.len() > 1 || (t.len() > 1 && *k > 1) { format!("({t})") } else { t };
            parts.push(if *k == 1 { t } else { format!("{t}^{k}") });
        }
        let den = if parts.len() > 1 { format!("({})", parts.join("*")) } else { parts.pop().unwrap() };
        write!(f, "{num}/{den}")
    }
}

impl Coefficient for DiffExpr {
    fn zero() -> Self {
        DiffExpr::zero()
    }
    fn one() -> Self {
        DiffExpr::one()
    }
    fn is_zero(&self) -> bool {
        DiffExpr::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        DiffExpr::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        DiffExpr::mul(self, other)
    }
    fn neg(&self) -> Self {
        DiffExpr::neg(self)
    }
    fn from_rational(c: &Rational) -> Self {
        DiffExpr::constant(c.clone())
    }
    fn scale(&self, c: &Rational) -> Self {
        DiffExpr::scale(self, c)
    }
}

impl From<Rational> for DiffExpr {
    fn from(c: Rational) -> Self {
        DiffExpr::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;
    use crate::diffring::{parse_expr, JetVariable};
    use proptest::prelude::*;

    fn e(s: &str) -> DiffExpr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn cancels_common_factors() {
        let d = DiffExpr::discriminant();
        let a = e("z*u'").mul(&d).div(&d.mul(&d));
        assert_eq!(a.denominator_factors().len(), 1);
        assert!(a.denominator_divides(&discriminant_poly(), 1), "{a:?} {:?}", a.denominator_factors());
        assert_eq!(a.mul(&d), e("z*u'"));
        assert_eq!(e("(z')^2/z").mul(&e("z/z'")), e("z'"));
    }

    #[test]
    fn derivative_of_log_argument() {
        let d = DiffExpr::discriminant();
        let lhs = d.d_x().div(&d);
        let rhs = e("(2*z'*z'' - z'*(u')^2 - 2*z*u'*u'')/((z')^2 - z*(u')^2)");
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn constants_are_normalized_out_of_factors() {
        let a = DiffExpr::one().div(&e("2*z' - 4*x"));
        assert_eq!(a.scale(&q(2, 1)), DiffExpr::one().div(&e("z' - 2*x")));
        assert_eq!(DiffExpr::x().d_x(), DiffExpr::one());
        assert_eq!(DiffExpr::jet(JetVariable::z(0)).d_x(), e("z'"));
    }

    #[test]
    fn sum_matches_pairwise_addition() {
        let terms = [e("1/z"), e("u/(z')^2"), e("1/((z')^2 - z*(u')^2)"), e("x")];
        let pairwise = terms.iter().fold(DiffExpr::zero(), |a, b| a.add(b));
        assert_eq!(DiffExpr::sum(terms.iter()), pairwise);
    }

    fn arb_expr() -> impl Strategy<Value = DiffExpr> {
        let atoms = ["u", "z", "u'", "z'", "x", "z''", "(z')^2 - z*(u')^2", "u + 2*z"];
        (
            proptest::collection::vec((0..atoms.len(), -3i64..4), 1..4),
            proptest::option::of(0..atoms.len()),
        )
            .prop_map(move |(ts, d)| {
                let mut num = DiffExpr::zero();
                for (i, c) in ts {
                    num = num.add(&e(atoms[i]).scale(&Rational::from_integer(c)));
                }
                match d {
                    Some(j) => num.div(&e(atoms[j])),
                    None => num,
                }
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn leibniz_rule(a in arb_expr(), b in arb_expr()) {
            let lhs = a.mul(&b).d_x();
            let rhs = a.d_x().mul(&b).add(&a.mul(&b.d_x()));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn field_operations(a in arb_expr(), b in arb_expr()) {
            prop_assert!(a.sub(&a).is_zero());
            prop_assume!(!b.is_zero());
            prop_assert_eq!(a.div(&b).mul(&b), a.clone());
            let once = a.add(&b);
            prop_assert_eq!(once.clone().reduced().num, once.num);
        }
    }
}
