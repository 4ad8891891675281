//! Bilateral Motzkin paths and the `N`-graded expansion of their
//! contributions to powers of the tridiagonal recurrence operator.
//!
//! A step from height `k` contributes `1` (up), `s_{n+k}` (flat) or
//! `r_{n+k}` (down). Shifted coefficients expand as
//! `s_{n+k} = sum_m k^m/m! N^-m s^(m)`. Polynomials here use the `u` slots for
//! `s`-jets and the `z` slots for `r`-jets.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{Monomial, Poly, Rational};
use crate::diffring::{DiffExpr, JetVariable};
use crate::stringpoly::{Partition, SrPoly, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Up,
    Flat,
    Down,
}

impl Step {
    fn delta(self) -> i32 {
        match self {
            Step::Up => 1,
            Step::Flat => 0,
            Step::Down => -1,
        }
    }

    fn letter(self) -> char {
        match self {
            Step::Up => 'U',
            Step::Flat => 'F',
            Step::Down => 'D',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MotzkinPath {
    pub steps: Vec<Step>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid path step {0:?}")]
pub struct PathParseError(char);

impl MotzkinPath {
    pub fn parse(s: &str) -> Result<Self, PathParseError> {
        let steps = s
            .chars()
            .map(|c| match c {
                'U' => Ok(Step::Up),
                'F' => Ok(Step::Flat),
                'D' => Ok(Step::Down),
                other => Err(PathParseError(other)),
            })
            .collect::<Result<_, _>>()?;
        Ok(MotzkinPath { steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Heights `p(0) = 0, p(1), ..., p(len)`.
    pub fn heights(&self) -> Vec<i32> {
        let mut h = vec![0];
        for s in &self.steps {
            h.push(h.last().unwrap() + s.delta());
        }
        h
    }

    pub fn end_height(&self) -> i32 {
        self.steps.iter().map(|s| s.delta()).sum()
    }
}

impl fmt::Display for MotzkinPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            write!(f, "{}", s.letter())?;
        }
        Ok(())
    }
}

/// Lazily enumerates all paths of the given length from height 0 to
/// `end_height`, in lexicographic order with `U < F < D`.
pub fn enumerate_paths(length: usize, end_height: i32) -> impl Iterator<Item = MotzkinPath> {
    PathIter::new(length, end_height)
}

struct PathIter {
    length: usize,
    end: i32,
    stack: Vec<Step>,
    height: i32,
    started: bool,
    done: bool,
}

impl PathIter {
    fn new(length: usize, end: i32) -> Self {
        PathIter { length, end, stack: Vec::new(), height: 0, started: false, done: false }
    }

    fn feasible(&self, height: i32, depth: usize) -> bool {
        ((self.end - height).unsigned_abs() as usize) <= self.length - depth
    }

    /// Extends the current prefix with the smallest feasible steps.
    fn descend(&mut self) -> bool {
        while self.stack.len() < self.length {
            let depth = self.stack.len() + 1;
            let next = [Step::Up, Step::Flat, Step::Down]
                .into_iter()
                .find(|s| self.feasible(self.height + s.delta(), depth));
            match next {
                Some(s) => {
                    self.stack.push(s);
                    self.height += s.delta();
                }
                None => return false,
            }
        }
        true
    }

    /// Moves to the next sibling prefix, popping as needed.
    fn advance(&mut self) -> bool {
        while let Some(last) = self.stack.pop() {
            self.height -= last.delta();
            let depth = self.stack.len() + 1;
            let candidates: &[Step] = match last {
                Step::Up => &[Step::Flat, Step::Down],
                Step::Flat => &[Step::Down],
                Step::Down => &[],
            };
            if let Some(&s) = candidates.iter().find(|s| self.feasible(self.height + s.delta(), depth)) {
                self.stack.push(s);
                self.height += s.delta();
                return true;
            }
        }
        false
    }
}

impl Iterator for PathIter {
    type Item = MotzkinPath;

    fn next(&mut self) -> Option<MotzkinPath> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if !self.feasible(0, 0) {
                self.done = true;
                return None;
            }
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        loop {
            if self.descend() {
                return Some(MotzkinPath { steps: self.stack.clone() });
            }
            if !self.advance() {
                self.done = true;
                return None;
            }
        }
    }
}

/// Number of paths of length `len` ending at `end`, by trinomial coefficients.
pub fn path_count(len: u32, end: i32) -> Rational {
    let mut total = Rational::zero();
    for i in 0..=len {
        let k = i as i64 - end as i64;
        if k < 0 || k as u32 > len || i + k as u32 > len {
            continue;
        }
        let j = len - i - k as u32;
        total += Rational::factorial(len)
            / (Rational::factorial(i) * Rational::factorial(j) * Rational::factorial(k as u32));
    }
    total
}

/// Powers of `N^-1` mapped to polynomials in the `s`, `r` jets.
#[derive(Clone, Debug, PartialEq)]
pub struct NGradedExpr {
    grades: Vec<Poly>,
}

impl NGradedExpr {
    pub fn order(&self) -> usize {
        self.grades.len() - 1
    }

    pub fn grade_poly(&self, k: usize) -> Poly {
        self.grades.get(k).cloned().unwrap_or_else(Poly::zero)
    }

    pub fn grade(&self, k: usize) -> DiffExpr {
        DiffExpr::from_poly(self.grade_poly(k))
    }
}

fn s_index(m: u32) -> usize {
    JetVariable::u(m).index()
}

fn r_index(m: u32) -> usize {
    JetVariable::z(m).index()
}

/// `N`-grade of a monomial: the total jet order.
fn monomial_grade(m: &Monomial) -> u32 {
    m.factors()
        .map(|(v, e)| JetVariable::from_index(v).map_or(0, |j| j.order) * e as u32)
        .sum()
}

/// `f_{n+k}` expanded to grade `order`, as one polynomial with grades mixed.
fn shifted(var: fn(u32) -> usize, k: i32, order: u32) -> Poly {
    let mut terms = Vec::new();
    let mut kpow = Rational::one();
    for m in 0..=order {
        if m > 0 {
            kpow = &kpow * &Rational::from_integer(k as i64);
        }
        if kpow.is_zero() {
            break;
        }
        terms.push((Monomial::var(var(m), 1), &kpow / &Rational::factorial(m)));
    }
    Poly::from_terms(terms)
}

/// Product truncated at total grade `order`.
fn mul_truncated(a: &Poly, b: &Poly, order: u32) -> Poly {
    let gb: Vec<u32> = b.terms().iter().map(|(m, _)| monomial_grade(m)).collect();
    let mut terms = Vec::new();
    for (ma, ca) in a.terms() {
        let ga = monomial_grade(ma);
        for ((mb, cb), g) in b.terms().iter().zip(&gb) {
            if ga + g <= order {
                terms.push((ma.mul(mb), ca * cb));
            }
        }
    }
    Poly::from_terms(terms)
}

fn split_grades(p: &Poly, order: u32) -> NGradedExpr {
    let mut buckets: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); order as usize + 1];
    for (m, c) in p.terms() {
        let g = monomial_grade(m);
        if g <= order {
            buckets[g as usize].push((*m, c.clone()));
        }
    }
    NGradedExpr { grades: buckets.into_iter().map(Poly::from_terms).collect() }
}

/// Expanded contribution of one path, truncated at `N^-order`.
pub fn contribution(p: &MotzkinPath, order: u32) -> NGradedExpr {
    let mut acc = Poly::one();
    let mut height = 0;
    for step in &p.steps {
        match step {
            Step::Up => {}
            Step::Flat => acc = mul_truncated(&acc, &shifted(s_index, height, order), order),
            Step::Down => acc = mul_truncated(&acc, &shifted(r_index, height, order), order),
        }
        height += step.delta();
    }
    split_grades(&acc, order)
}

/// Sum of all path contributions of the given length and end height,
/// computed by a transfer recursion over heights.
pub fn path_sum(length: u32, end_height: i32, order: u32) -> NGradedExpr {
    let key = (length, end_height, order);
    let cache = PATH_SUMS.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return (**hit).clone();
    }
    let len = length as i32;
    let offset = len;
    let mut cur: Vec<Poly> = vec![Poly::zero(); (2 * len + 1) as usize];
    cur[offset as usize] = Poly::one();
    for step in 0..len {
        let next: Vec<Poly> = (0..=2 * len)
            .into_par_iter()
            .map(|idx| {
                let h = idx - offset;
                // only heights that can still reach the end matter
                if (end_height - h).abs() > len - step - 1 {
                    return Poly::zero();
                }
                let mut parts = Vec::new();
                if h - 1 >= -len && !cur[(idx - 1) as usize].is_zero() {
                    parts.push(cur[(idx - 1) as usize].clone());
                }
                if !cur[idx as usize].is_zero() {
                    parts.push(mul_truncated(&cur[idx as usize], &shifted(s_index, h, order), order));
                }
                if h + 1 <= len && !cur[(idx + 1) as usize].is_zero() {
                    parts.push(mul_truncated(&cur[(idx + 1) as usize], &shifted(r_index, h + 1, order), order));
                }
                parts.iter().fold(Poly::zero(), |a, b| a.add(b))
            })
            .collect();
        cur = next;
    }
    let total = if end_height.abs() <= len { cur[(end_height + offset) as usize].clone() } else { Poly::zero() };
    let out = split_grades(&total, order);
    cache.lock().unwrap().insert(key, Arc::new(out.clone()));
    out
}

type PathSumCache = Mutex<HashMap<(u32, i32, u32), Arc<NGradedExpr>>>;
static PATH_SUMS: OnceLock<PathSumCache> = OnceLock::new();

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MotzkinError {
    #[error("J must be positive")]
    ZeroJ,
}

/// Jet monomial `prod s^(lambda_i) prod r^(eta_j)`.
pub fn jet_monomial(lambda: &Partition, eta: &Partition) -> Monomial {
    let mut m = Monomial::ONE;
    for &p in lambda.parts() {
        let i = s_index(p);
        m.set_exp(i, m.exp(i) + 1);
    }
    for &p in eta.parts() {
        let i = r_index(p);
        m.set_exp(i, m.exp(i) + 1);
    }
    m
}

/// Coefficient of the jet monomial in a grade polynomial, as a polynomial in
/// the undifferentiated `s`, `r`.
pub fn extract_coefficient(p: &Poly, target: &Monomial) -> SrPoly {
    let (s0, r0) = (s_index(0), r_index(0));
    let mut out = SrPoly::zero();
    for (m, c) in p.terms() {
        let mut high = *m;
        high.set_exp(s0, 0);
        high.set_exp(r0, 0);
        if high == *target {
            out.add_term(m.exp(s0) as u32, 2 * m.exp(r0) as i32, c);
        }
    }
    out
}

/// `P~_{lambda,eta,J}`: the coefficient of `d^lambda s d^eta r` in the sum of
/// contributions over paths of length `J-1` ending at 0 (variant a) or -1
/// (variant b).
pub fn modified_string_poly(
    lambda: &Partition,
    eta: &Partition,
    j: u32,
    variant: Variant,
) -> Result<SrPoly, MotzkinError> {
    if j == 0 {
        return Err(MotzkinError::ZeroJ);
    }
    let order = lambda.weight() + eta.weight();
    let end = match variant {
        Variant::A => 0,
        Variant::B => -1,
    };
    let sum = path_sum(j - 1, end, order);
    Ok(extract_coefficient(&sum.grade_poly(order as usize), &jet_monomial(lambda, eta)))
}

/// Same quantity by explicit enumeration of paths; used as an oracle.
pub fn modified_string_poly_by_paths(lambda: &Partition, eta: &Partition, j: u32, variant: Variant) -> SrPoly {
    let order = lambda.weight() + eta.weight();
    let end = match variant {
        Variant::A => 0,
        Variant::B => -1,
    };
    let target = jet_monomial(lambda, eta);
    enumerate_paths((j - 1) as usize, end)
        .map(|p| extract_coefficient(&contribution(&p, order).grade_poly(order as usize), &target))
        .fold(SrPoly::zero(), |a, b| a.add(&b))
}
