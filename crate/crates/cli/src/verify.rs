//! The `verify` suite: each check is named so the first failure can be reported.

use std::fmt::Write as _;
use std::sync::OnceLock;

use clap::ValueEnum;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::{Failure, Report};
use stringforge_core::algebra::Rational;
use stringforge_core::genfun::{closed_form, verify_closed_form};
use stringforge_core::maps::compare;
use stringforge_core::phipsi::check_unwinding_up_to;
use stringforge_core::solver::{build_table, grading_check, odd_residual, residual, GenusTable};
use stringforge_core::specialize::{direct_order_two, evaluate, leading_order_series, CouplingSeries, Potential, TExp};
use stringforge_core::stringpoly::identities::{
    derivative_swap_holds, integration_by_parts_holds, raising_lowering_hold, reflection_holds, zeroing_holds,
};
use stringforge_core::stringpoly::{generate_table, golden_table, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Table,
    Identities,
    Unwinding,
    Backsub,
    Grading,
    ClosedForms,
    Oracle,
    Crossmode,
    Series,
}

impl Check {
    const ALL: [Check; 9] = [
        Check::Table,
        Check::Identities,
        Check::Unwinding,
        Check::Backsub,
        Check::Grading,
        Check::ClosedForms,
        Check::Oracle,
        Check::Crossmode,
        Check::Series,
    ];

    fn name(self) -> String {
        self.to_possible_value().map_or_else(String::new, |v| v.get_name().to_string())
    }
}

const QUARTIC: &str = "0.5*l^2 + t4*l^4";
const CUBIC: &str = "0.5*l^2 + t3*l^3";
const IDENTITY_MAX_Q: u32 = 10;
const SERIES_SAMPLES: usize = 32;

fn solved() -> Result<&'static GenusTable, String> {
    static TABLE: OnceLock<Result<GenusTable, String>> = OnceLock::new();
    TABLE.get_or_init(|| build_table(2).map_err(|e| e.to_string())).as_ref().map_err(Clone::clone)
}

/// `Ok(detail)` on pass, `Err(detail)` on failure.
fn run_check(c: Check, m: u32, seed: u64) -> Result<String, String> {
    match c {
        Check::Table => {
            let table = generate_table(3).map_err(|e| e.to_string())?;
            let golden = golden_table();
            for (l, h, a, b) in &golden {
                for (v, expected) in [(Variant::A, a), (Variant::B, b)] {
                    if table.get(l, h, v) != Some(expected) {
                        return Err(format!("row ({l}, {h}) variant {v} differs"));
                    }
                }
            }
            Ok(format!("{} reference rows", golden.len()))
        }
        Check::Identities => {
            let q = IDENTITY_MAX_Q;
            let all = [
                ("raising/lowering", raising_lowering_hold(q)),
                ("derivative swap", derivative_swap_holds(q)),
                ("integration by parts", integration_by_parts_holds(q)),
                ("reflection", reflection_holds(q)),
                ("zeroing", zeroing_holds(q)),
            ];
            match all.iter().find(|(_, ok)| !ok) {
                Some((n, _)) => Err(format!("{n} identity")),
                None => Ok(format!("5 identities, powers up to {q}")),
            }
        }
        Check::Unwinding => {
            if m == 0 {
                return Err("--m must be at least 1".into());
            }
            match check_unwinding_up_to(m).into_iter().find(|(_, ok)| !ok) {
                Some((k, _)) => Err(format!("m = {k}")),
                None => Ok(format!("m = 1..{m}")),
            }
        }
        Check::Backsub => {
            let t = solved()?;
            for g in 0..=2 {
                for v in [Variant::A, Variant::B] {
                    if g > 0 && !residual(g, v, t).map_err(|e| e.to_string())?.is_zero() {
                        return Err(format!("genus {g}, variant {v}"));
                    }
                    if !odd_residual(g, v, t).map_err(|e| e.to_string())?.is_zero() {
                        return Err(format!("order {}, variant {v}", 2 * g + 1));
                    }
                }
            }
            Ok("genus 1..2, odd orders 1..5".into())
        }
        Check::Grading => {
            let v = grading_check(solved()?);
            match v.first() {
                Some(v) => Err(format!("{}: {}", v.entry, v.problem)),
                None => Ok("z1 u2 u3 z2 u4 u5".into()),
            }
        }
        Check::ClosedForms => {
            let t = solved()?;
            for g in 1..=2 {
                if !verify_closed_form(g, &closed_form(g).unwrap(), &t.z_list()).equal {
                    return Err(format!("genus {g}"));
                }
            }
            Ok("genus 1 and 2".into())
        }
        Check::Oracle => {
            let mut rows = 0;
            for (src, g, n) in [(QUARTIC, 0, 3), (QUARTIC, 1, 2), (CUBIC, 0, 4), (CUBIC, 1, 4)] {
                let v = Potential::parse(src).unwrap();
                for row in compare(&v, g, n).map_err(|e| e.to_string())? {
                    rows += 1;
                    if !row.matches() {
                        return Err(format!("{src}, genus {g}: {row:?}"));
                    }
                }
            }
            Ok(format!("{rows} counts"))
        }
        Check::Crossmode => {
            let t = solved()?;
            for src in [QUARTIC, CUBIC] {
                let v = Potential::parse(src).unwrap();
                let d = direct_order_two(&v, 4).map_err(|e| e.to_string())?;
                let (u, z) = leading_order_series(&v, 4).map_err(|e| e.to_string())?;
                let z1 = evaluate(&t.z(1).unwrap(), &u, &z).map_err(|e| e.to_string())?;
                let u2 = evaluate(&t.u(2).unwrap(), &u, &z).map_err(|e| e.to_string())?;
                if z1 != d.z1 || u2 != d.u2 {
                    return Err(format!("{src}"));
                }
            }
            Ok("quartic and cubic, order 4".into())
        }
        Check::Series => {
            let mut rng = StdRng::seed_from_u64(seed);
            for i in 0..SERIES_SAMPLES {
                let s = random_unit_series(&mut rng);
                let inv = s.inv().map_err(|e| e.to_string())?;
                let one = CouplingSeries::one_like(&s);
                let log_sq = s.mul(&s).log().map_err(|e| e.to_string())?;
                let two_log = s.log().map_err(|e| e.to_string())?.scale(&Rational::from_integer(2));
                if s.mul(&inv) != one || log_sq != two_log {
                    return Err(format!("sample {i} (seed {seed})"));
                }
            }
            Ok(format!("{SERIES_SAMPLES} random series, seed {seed}"))
        }
    }
}

fn random_unit_series(rng: &mut StdRng) -> CouplingSeries {
    let order = Some(4);
    let mut s = CouplingSeries::constant(Rational::one()).with_order(order);
    for _ in 0..4 {
        let mut t = TExp::default();
        t.0[2] = rng.gen_range(0..3);
        t.0[3] = rng.gen_range(0..2);
        if t.degree() == 0 {
            continue;
        }
        let c = Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=4));
        let x2 = 2 * rng.gen_range(0..=3);
        s = s.add(&CouplingSeries::monomial(t, x2, c, order));
    }
    s
}

pub fn run(only: Option<Check>, m: u32, cfg: &RunConfig) -> Result<Report, Failure> {
    if only.is_some_and(|c| c != Check::Unwinding) && m != 5 {
        return Err(Failure::Input(anyhow::anyhow!("--m only applies to the unwinding check")));
    }
    let checks: Vec<Check> = only.map_or_else(|| Check::ALL.to_vec(), |c| vec![c]);
    let mut results = Vec::new();
    let mut first_failure = None;
    for c in checks {
        let r = run_check(c, m, cfg.seed);
        if r.is_err() && first_failure.is_none() {
            first_failure = Some(format!("{}: {}", c.name(), r.as_ref().unwrap_err()));
        }
        results.push((c, r));
    }
    let mut text = String::new();
    let mut checks = Map::new();
    for (c, r) in &results {
        let (status, detail) = match r {
            Ok(d) => ("pass", d),
            Err(d) => ("FAIL", d),
        };
        writeln!(text, "{status:<5} {:<13} {detail}", c.name()).unwrap();
        checks.insert(c.name(), json!({"pass": r.is_ok(), "detail": detail}));
    }
    let mut json = Map::new();
    json.insert("checks".into(), Value::Object(checks));
    json.insert("seed".into(), json!(cfg.seed));
    Ok(Report { json, text, failure: first_failure })
}
