//! Continuum string equations order by order in `N^-2`, solved for `z_g` and
//! `u_2g`.
//!
//! With `s = u + u_1 e + u_2 e^2 + ...` and `r = z + z_1 e^2 + ...` (`e = 1/N`),
//! the string equations expand as
//! `sum_(lambda, eta) e^|lambda|+|eta| d^lambda s d^eta r P_(lambda, eta) G(s, r)`
//! where `G = [h^0] V(h + s + r/h)` and `P` is the string operator composed
//! with `d_s` (plus `r d_r` for the `[h^-1]` equation). Taylor expanding `G`
//! around `(u, z)` and reading `d_s^m G = phi_(m-1)`, `d_s^m d_r G = psi_m / z`
//! gives rational expressions in the jets of `u` and `z`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::algebra::Rational;
use crate::diffring::{
    discriminant_poly, diff_weight, parse_expr, poly_degree, Base, DiffExpr, Grade, JetVariable, Names,
};
use crate::genfun::bernoulli;
use crate::phipsi::phi_psi;
use crate::stringpoly::{generate_table, reduce_mod_i, OperatorPoly, OperatorTable, Partition, StringPolyError, Variant};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("genus {genus} needs {missing}, which is not in the table")]
    MissingLowerGenus { genus: usize, missing: String },
    #[error("the genus {0} unknowns cannot be isolated")]
    SingularPivot(usize),
    #[error("operator term r^({0}/2) has no polynomial evaluation")]
    OddHalfPower(i32),
    #[error("operator term without derivatives cannot be evaluated")]
    BareGenerator,
    #[error(transparent)]
    StringPoly(#[from] StringPolyError),
}

/// `z_g` for `g >= 1` and `u_k` for `k >= 1`; `z_0 = z`, `u_0 = u`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GenusTable {
    z: BTreeMap<usize, DiffExpr>,
    u: BTreeMap<usize, DiffExpr>,
}

impl GenusTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn z(&self, g: usize) -> Option<DiffExpr> {
        if g == 0 {
            return Some(DiffExpr::jet(JetVariable::z(0)));
        }
        self.z.get(&g).cloned()
    }

    pub fn u(&self, k: usize) -> Option<DiffExpr> {
        if k == 0 {
            return Some(DiffExpr::jet(JetVariable::u(0)));
        }
        self.u.get(&k).cloned()
    }

    pub fn set_z(&mut self, g: usize, e: DiffExpr) {
        self.z.insert(g, e);
    }

    pub fn set_u(&mut self, k: usize, e: DiffExpr) {
        self.u.insert(k, e);
    }

    /// Highest `g` with `z_g` present.
    pub fn genus(&self) -> usize {
        self.z.keys().next_back().copied().unwrap_or(0)
    }

    /// `[z_1, ..., z_g]`.
    pub fn z_list(&self) -> Vec<DiffExpr> {
        self.z.values().cloned().collect()
    }

    /// The table with `u` and all its derivatives set to zero.
    pub fn symmetric(&self) -> GenusTable {
        GenusTable {
            z: self.z.iter().map(|(k, e)| (*k, drop_u(e))).collect(),
            u: self.u.iter().map(|(k, e)| (*k, drop_u(e))).collect(),
        }
    }

    /// Keys `z1`, `u2`, ... in genus order, values in canonical text.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        let mut keys: Vec<(usize, String, &DiffExpr)> = Vec::new();
        for (g, e) in &self.z {
            keys.push((2 * g, format!("z{g}"), e));
        }
        for (k, e) in &self.u {
            keys.push((*k, format!("u{k}"), e));
        }
        keys.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        for (_, k, e) in keys {
            map.insert(k, Value::String(e.display_with(Names::UZ).to_string()));
        }
        Value::Object(map)
    }
}

/// Sets `u` and all its derivatives to zero.
pub fn drop_u(e: &DiffExpr) -> DiffExpr {
    e.substitute(|v| match JetVariable::from_index(v) {
        Some(j) if j.base == Base::U => DiffExpr::zero(),
        _ => DiffExpr::var(v),
    })
}

static TABLES: OnceLock<Mutex<HashMap<u32, Arc<OperatorTable>>>> = OnceLock::new();

/// Operator table of at least the given weight, generated once per process.
pub fn operator_table(max_weight: u32) -> Result<Arc<OperatorTable>, StringPolyError> {
    let cache = TABLES.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().iter().find(|(w, _)| **w >= max_weight).map(|(_, t)| t.clone()) {
        return Ok(t);
    }
    let t = Arc::new(generate_table(max_weight)?);
    cache.lock().unwrap().insert(max_weight, t.clone());
    Ok(t)
}

/// `c + a u_2g + b z_g`: one continuum equation at order `N^-2g`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    pub constant: DiffExpr,
    pub coeff_u: DiffExpr,
    pub coeff_z: DiffExpr,
}

impl LinearForm {
    pub fn at(&self, u: &DiffExpr, z: &DiffExpr) -> DiffExpr {
        DiffExpr::sum([self.constant.clone(), self.coeff_u.mul(u), self.coeff_z.mul(z)].iter())
    }
}

/// Images of the operator monomials `r^(e/2) d_s^m d_r^b` (with `b <= 1`)
/// acting on `G`.
fn evaluate_operator(op: &OperatorPoly) -> Result<DiffExpr, SolverError> {
    let z = DiffExpr::jet(JetVariable::z(0));
    let mut parts = Vec::new();
    for (key, c) in op.terms() {
        if key.r_half % 2 != 0 {
            return Err(SolverError::OddHalfPower(key.r_half));
        }
        let zp = key.r_half / 2;
        let value = match (key.ds, key.dr) {
            (m, 1) => z.pow(zp - 1).mul(&phi_psi(m).psi),
            (0, 0) => return Err(SolverError::BareGenerator),
            (m, 0) => z.pow(zp).mul(&phi_psi(m - 1).phi),
            _ => unreachable!("operator not reduced"),
        };
        parts.push(value.scale(c));
    }
    Ok(DiffExpr::sum(parts.iter()))
}

/// The operator acting on `G` for one cell: the table entry composed with
/// `d_s`, plus `r d_r` for the empty cell of the `[h^-1]` equation.
fn base_operator(table: &OperatorTable, lambda: &Partition, eta: &Partition, variant: Variant) -> OperatorPoly {
    let op = table.get(lambda, eta, variant).expect("cell missing from operator table");
    let mut base = op.compose_left(1, 0);
    if variant == Variant::B && lambda.is_empty() && eta.is_empty() {
        base = base.add(&OperatorPoly::term(2, 0, 1, Rational::one()));
    }
    base
}

/// Truncated series in `e` with `DiffExpr` coefficients.
type Series = Vec<DiffExpr>;

fn series_mul(a: &Series, b: &Series, len: usize) -> Series {
    (0..len)
        .map(|k| {
            let terms: Vec<DiffExpr> = (0..=k)
                .filter(|i| *i < a.len() && k - i < b.len())
                .filter(|i| !a[*i].is_zero() && !b[k - *i].is_zero())
                .map(|i| a[i].mul(&b[k - i]))
                .collect();
            DiffExpr::sum(terms.iter())
        })
        .collect()
}

struct Expansion {
    /// Coefficients of `s` and `r` in `e`, up to `e^2g`.
    s: Series,
    r: Series,
    /// `d_x^p` of each coefficient, filled on demand.
    s_jets: Mutex<HashMap<(usize, u32), DiffExpr>>,
    r_jets: Mutex<HashMap<(usize, u32), DiffExpr>>,
    order: usize,
}

impl Expansion {
    /// `d_x^p` of the first `len` coefficients.
    fn derivative(&self, which: Base, p: u32, len: usize) -> Series {
        let (src, memo) = match which {
            Base::U => (&self.s, &self.s_jets),
            Base::Z => (&self.r, &self.r_jets),
        };
        (0..len)
            .map(|i| {
                if src[i].is_zero() {
                    return DiffExpr::zero();
                }
                if let Some(hit) = memo.lock().unwrap().get(&(i, p)) {
                    return hit.clone();
                }
                let d = src[i].d_x_n(p);
                memo.lock().unwrap().insert((i, p), d.clone());
                d
            })
            .collect()
    }
}

fn expansion(g: usize, table: &GenusTable, u_top: DiffExpr, z_top: DiffExpr) -> Result<Expansion, SolverError> {
    let order = 2 * g;
    let missing = |name: String| SolverError::MissingLowerGenus { genus: g, missing: name };
    let mut s = Vec::with_capacity(order + 1);
    for k in 0..order {
        s.push(table.u(k).ok_or_else(|| missing(format!("u{k}")))?);
    }
    s.push(u_top);
    let mut r = vec![DiffExpr::zero(); order + 1];
    for h in 0..g {
        r[2 * h] = table.z(h).ok_or_else(|| missing(format!("z{h}")))?;
    }
    r[order] = z_top;
    Ok(Expansion { s, r, s_jets: Mutex::default(), r_jets: Mutex::default(), order })
}

/// `e^rem` coefficient of `d^lambda s d^eta r P G(s, r)` for one cell.
fn cell_contribution(
    ex: &Expansion,
    table: &OperatorTable,
    lambda: &Partition,
    eta: &Partition,
    variant: Variant,
) -> Result<DiffExpr, SolverError> {
    let rem = ex.order - (lambda.weight() + eta.weight()) as usize;
    let len = rem + 1;
    let mut jets: Series = vec![DiffExpr::one()];
    for &p in lambda.parts() {
        jets = series_mul(&jets, &ex.derivative(Base::U, p, len), len);
    }
    for &p in eta.parts() {
        jets = series_mul(&jets, &ex.derivative(Base::Z, p, len), len);
    }
    let mut ds = ex.s[..len].to_vec();
    ds[0] = DiffExpr::zero();
    let mut dr = ex.r[..len].to_vec();
    dr[0] = DiffExpr::zero();
    let base = base_operator(table, lambda, eta, variant);
    // sum_(i, j) ds^i dr^j / (i! j!) d_s^i d_r^j P G, truncated at e^rem
    let mut taylor: Series = vec![DiffExpr::zero(); len];
    let mut dr_pow: Series = vec![DiffExpr::one()];
    for j in 0..=rem / 2 {
        if j > 0 {
            dr_pow = series_mul(&dr_pow, &dr, len);
        }
        let mut pow = dr_pow.clone();
        for i in 0..=(rem - 2 * j) {
            if i > 0 {
                pow = series_mul(&pow, &ds, len);
            }
            if pow.iter().all(|c| c.is_zero()) {
                break;
            }
            let value = evaluate_operator(&reduce_mod_i(&base.compose_left(i as u32, j as u32)))?;
            if value.is_zero() {
                continue;
            }
            let w = value.scale(&(Rational::factorial(i as u32) * Rational::factorial(j as u32)).recip());
            for (k, c) in pow.iter().enumerate() {
                if !c.is_zero() {
                    taylor[k] = taylor[k].add(&c.mul(&w));
                }
            }
        }
    }
    Ok(series_mul(&jets, &taylor, len).pop().unwrap())
}

/// Order `N^-2g` coefficient of one string equation, with the top unknowns
/// `u_2g`, `z_g` set to the given values.
fn equation_at(
    g: usize,
    variant: Variant,
    table: &GenusTable,
    u_top: DiffExpr,
    z_top: DiffExpr,
) -> Result<DiffExpr, SolverError> {
    let ops = operator_table(2 * g as u32)?;
    let ex = expansion(g, table, u_top, z_top)?;
    let cells = Partition::pairs_up_to(2 * g as u32);
    let parts = cells
        .par_iter()
        .map(|(l, h)| cell_contribution(&ex, &ops, l, h, variant))
        .collect::<Result<Vec<_>, _>>()?;
    let mut total = DiffExpr::sum(parts.iter());
    if g == 0 && variant == Variant::B {
        total = total.sub(&DiffExpr::x());
    }
    Ok(total)
}

/// Leading-order equations: `phi_0 = 0` and `psi_0 - x = 0`.
pub fn leading_equation(variant: Variant) -> Result<DiffExpr, SolverError> {
    equation_at(0, variant, &GenusTable::new(), DiffExpr::jet(JetVariable::u(0)), DiffExpr::jet(JetVariable::z(0)))
}

/// The order `N^-2g` equation as a linear form in `u_2g`, `z_g`.
pub fn continuum_equation(g: usize, variant: Variant, table: &GenusTable) -> Result<LinearForm, SolverError> {
    assert!(g >= 1, "use leading_equation for genus zero");
    let constant = equation_at(g, variant, table, DiffExpr::zero(), DiffExpr::zero())?;
    let ops = operator_table(0)?;
    let base = base_operator(&ops, &Partition::empty(), &Partition::empty(), variant);
    let coeff_u = evaluate_operator(&reduce_mod_i(&base.compose_left(1, 0)))?;
    let coeff_z = evaluate_operator(&reduce_mod_i(&base.compose_left(0, 1)))?;
    Ok(LinearForm { constant, coeff_u, coeff_z })
}

/// Full residual of one equation at order `N^-2g` with `u_2g`, `z_g` taken
/// from the table.
pub fn residual(g: usize, variant: Variant, table: &GenusTable) -> Result<DiffExpr, SolverError> {
    let missing = |name: String| SolverError::MissingLowerGenus { genus: g, missing: name };
    let u_top = table.u(2 * g).ok_or_else(|| missing(format!("u{}", 2 * g)))?;
    let z_top = table.z(g).ok_or_else(|| missing(format!("z{g}")))?;
    equation_at(g, variant, table, u_top, z_top)
}

/// Residual of the odd order `N^-(2g+1)`, using the odd `u` from the table.
pub fn odd_residual(g: usize, variant: Variant, table: &GenusTable) -> Result<DiffExpr, SolverError> {
    let order = 2 * g + 1;
    let ops = operator_table(order as u32)?;
    let missing = |name: String| SolverError::MissingLowerGenus { genus: g, missing: name };
    let mut s = Vec::with_capacity(order + 1);
    for k in 0..=order {
        s.push(table.u(k).ok_or_else(|| missing(format!("u{k}")))?);
    }
    let mut r = vec![DiffExpr::zero(); order + 1];
    for h in 0..=g {
        r[2 * h] = table.z(h).ok_or_else(|| missing(format!("z{h}")))?;
    }
    let ex = Expansion { s, r, s_jets: Mutex::default(), r_jets: Mutex::default(), order };
    let cells = Partition::pairs_up_to(order as u32);
    let parts = cells
        .par_iter()
        .map(|(l, h)| cell_contribution(&ex, &ops, l, h, variant))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DiffExpr::sum(parts.iter()))
}

/// Solves both order `N^-2g` equations for `(z_g, u_2g)`.
pub fn solve_genus(g: usize, table: &GenusTable) -> Result<(DiffExpr, DiffExpr), SolverError> {
    let (a, b) = rayon::join(|| continuum_equation(g, Variant::A, table), || continuum_equation(g, Variant::B, table));
    let (a, b) = (a?, b?);
    let det = a.coeff_u.mul(&b.coeff_z).sub(&a.coeff_z.mul(&b.coeff_u));
    if det.is_zero() {
        return Err(SolverError::SingularPivot(g));
    }
    let u = a.coeff_z.mul(&b.constant).sub(&b.coeff_z.mul(&a.constant)).div(&det);
    let z = b.coeff_u.mul(&a.constant).sub(&a.coeff_u.mul(&b.constant)).div(&det);
    Ok((z, u))
}

/// `u_(2g+1) = -sum_(m=1)^(2g+1) B_m / m! d_x^m u_(2g+1-m)`.
pub fn odd_u(g: usize, table: &GenusTable) -> Result<DiffExpr, SolverError> {
    let k = 2 * g + 1;
    let mut parts = Vec::with_capacity(k);
    for m in 1..=k {
        let b = bernoulli(m as u32);
        if b.is_zero() {
            continue;
        }
        let lower = table
            .u(k - m)
            .ok_or_else(|| SolverError::MissingLowerGenus { genus: g, missing: format!("u{}", k - m) })?;
        parts.push(lower.d_x_n(m as u32).scale(&(-b / Rational::factorial(m as u32))));
    }
    Ok(DiffExpr::sum(parts.iter()))
}

/// Solves genus by genus up to `max_genus`, including `u_(2 max_genus + 1)`.
pub fn build_table(max_genus: usize) -> Result<GenusTable, SolverError> {
    let mut table = GenusTable::new();
    table.set_u(1, odd_u(0, &table)?);
    for g in 1..=max_genus {
        let (z, u) = solve_genus(g, &table)?;
        table.set_z(g, z);
        table.set_u(2 * g, u);
        table.set_u(2 * g + 1, odd_u(g, &table)?);
    }
    Ok(table)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradingViolation {
    pub entry: String,
    pub problem: String,
}

/// Degrees, weights and denominator bounds of every table entry.
pub fn grading_check(table: &GenusTable) -> Vec<GradingViolation> {
    let d = discriminant_poly();
    let mut checks: Vec<(String, DiffExpr, Rational, Rational, u32)> = Vec::new();
    for (g, e) in &table.z {
        let g = *g as u32;
        checks.push((format!("z{g}"), e.clone(), Rational::one(), Rational::from(2 * g), (8 * g).saturating_sub(3)));
    }
    for (k, e) in &table.u {
        let k = *k as u32;
        let bound = if k % 2 == 0 { (4 * k).saturating_sub(3) } else { (4 * (k - 1)).saturating_sub(2) };
        checks.push((format!("u{k}"), e.clone(), Rational::new(1, 2), Rational::from(k), bound));
    }
    let mut out = Vec::new();
    for (name, e, degree, weight, bound) in checks {
        let report = |problem: String| GradingViolation { entry: name.clone(), problem };
        if e.is_zero() {
            continue;
        }
        match poly_degree(&e) {
            Grade::Homogeneous(v) if v == degree => {}
            other => out.push(report(format!("degree {other:?}, expected {degree}"))),
        }
        match diff_weight(&e) {
            Grade::Homogeneous(v) if v == weight => {}
            other => out.push(report(format!("weight {other:?}, expected {weight}"))),
        }
        if !e.denominator_divides(&d, bound) {
            let den = e.denominator();
            out.push(report(format!("denominator {den:?} does not divide D^{bound}")));
        }
    }
    out
}

/// `z_1 / z` in the closed form `(1/24) d_x^2 log D`.
pub fn z1_over_z_closed_form() -> DiffExpr {
    let d = DiffExpr::discriminant();
    d.d_x_n(2).div(&d).sub(&d.d_x().pow(2).div(&d.pow(2))).scale(&Rational::new(1, 24))
}

/// Genus `g` solution as JSON: `z_g`, `u_2g`, `u_(2g+1)` and `d_x^2 F^(g)`.
pub fn genus_report(g: usize, table: &GenusTable) -> Value {
    let text = |e: Option<DiffExpr>| json!(e.map(|e| e.display_with(Names::UZ).to_string()));
    let mut map = Map::new();
    map.insert("genus".into(), json!(g));
    map.insert(format!("z{g}"), text(table.z(g)));
    map.insert(format!("u{}", 2 * g), text(table.u(2 * g)));
    map.insert(format!("u{}", 2 * g + 1), text(table.u(2 * g + 1)));
    Value::Object(map)
}

/// Convenience: parses with `u`, `z` names.
pub fn expr(s: &str) -> DiffExpr {
    parse_expr(s).expect("valid expression")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_order_is_phi0_psi0() {
        assert!(leading_equation(Variant::A).unwrap().is_zero());
        let b = leading_equation(Variant::B).unwrap();
        assert!(b.is_zero(), "psi_0 - x = {b}");
    }

    #[test]
    fn genus_one_pivot_coefficients() {
        let t = build_table(0).unwrap();
        let a = continuum_equation(1, Variant::A, &t).unwrap();
        let b = continuum_equation(1, Variant::B, &t).unwrap();
        let p1 = phi_psi(1);
        let z = expr("z");
        assert_eq!(a.coeff_u, p1.phi);
        assert_eq!(a.coeff_z, p1.psi.div(&z));
        assert_eq!(b.coeff_u, p1.psi);
        assert_eq!(b.coeff_z, p1.phi);
    }

    #[test]
    fn genus_one_solution() {
        let t = build_table(1).unwrap();
        let z1 = t.z(1).unwrap();
        assert_eq!(z1.div(&expr("z")), z1_over_z_closed_form());
        assert!(residual(1, Variant::A, &t).unwrap().is_zero());
        assert!(residual(1, Variant::B, &t).unwrap().is_zero());
        assert!(grading_check(&t).is_empty(), "{:?}", grading_check(&t));
    }

    #[test]
    fn odd_orders_vanish() {
        let t = build_table(1).unwrap();
        for g in 0..=1 {
            for v in [Variant::A, Variant::B] {
                assert!(odd_residual(g, v, &t).unwrap().is_zero(), "g = {g}, {v:?}");
            }
        }
    }

    #[test]
    fn odd_u_low_orders() {
        let mut t = GenusTable::new();
        assert_eq!(odd_u(0, &t).unwrap(), expr("u'/2"));
        t.set_u(1, expr("u'/2"));
        t.set_u(2, expr("u''"));
        assert_eq!(odd_u(1, &t).unwrap(), expr("u'''/2 - u'''/24"));
    }

    #[test]
    fn symmetric_genus_one() {
        let t = build_table(1).unwrap().symmetric();
        assert!(t.u(2).unwrap().is_zero());
        assert!(t.u(3).unwrap().is_zero());
        let z1 = t.z(1).unwrap();
        let zp = expr("z'");
        let expected = expr("z").mul(&zp.d_x_n(2).div(&zp).sub(&zp.d_x().pow(2).div(&zp.pow(2)))).scale(&Rational::new(1, 12));
        assert_eq!(z1, expected);
    }

    #[test]
    fn missing_lower_genus() {
        let t = GenusTable::new();
        assert!(matches!(continuum_equation(1, Variant::A, &t), Err(SolverError::MissingLowerGenus { .. })));
    }
}
