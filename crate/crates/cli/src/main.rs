mod config;
mod verify;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use config::{Format, Overrides};
use stringforge_core::diffring::{parse_log_combo, LogCombo, Names};
use stringforge_core::genfun::{closed_form, free_energy_relation, verify_closed_form};
use stringforge_core::maps::{profile_of, profiles};
use stringforge_core::solver::{build_table, drop_u, grading_check, odd_residual, residual};
use stringforge_core::specialize::{free_energy_series, leading_order_series, map_count, Potential, SpecializeError};
use stringforge_core::stringpoly::{generate_table, Variant};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "stringforge", version, about = "String equations, genus expansions and map counts")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: STRINGFORGE_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for the randomized checks of `verify`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Key-value config file; its settings override flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate the table of string operators.
    Table {
        #[arg(long, default_value_t = 3)]
        max_weight: u32,
    },
    /// Solve the continuum string equations through the given genus.
    Solve {
        #[arg(long)]
        genus: usize,
        /// Restrict to even potentials (u = 0).
        #[arg(long)]
        symmetric: bool,
    },
    /// Expand u, z and F^(g) for a concrete potential.
    Specialize {
        /// Potential such as "0.5*l^2 + t4*l^4".
        #[arg(short = 'V', long = "potential")]
        potential: String,
        /// Truncation order in the couplings.
        #[arg(long)]
        order: Option<u32>,
        #[arg(long, default_value_t = 0)]
        genus: u32,
    },
    /// Run the identity and property suite.
    Verify {
        #[arg(long, value_enum)]
        only: Option<verify::Check>,
        /// Largest m for the unwinding check.
        #[arg(long, default_value_t = 5)]
        m: u32,
    },
}

#[derive(Debug)]
pub enum Failure {
    Verification(String),
    Generation(anyhow::Error),
    Input(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Generation(_) => 2,
            Failure::Input(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Verification(_) => "verification",
            Failure::Generation(_) => "generation",
            Failure::Input(_) => "input",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Verification(m) => m.clone(),
            Failure::Generation(e) | Failure::Input(e) => format!("{e:#}"),
        }
    }
}

/// Command output. A verification failure still prints the report.
pub struct Report {
    pub json: Map<String, Value>,
    pub text: String,
    pub failure: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let flags = Overrides { format: cli.format, threads: cli.threads, seed: cli.seed, order: None };
    let env = std::env::var("STRINGFORGE_THREADS").ok();
    let cfg = match config::resolve(cli.config.as_deref(), &flags, env.as_deref()) {
        Ok(c) => c,
        Err(e) => return finish(cli.format.unwrap_or(Format::Text), "config", Err(Failure::Input(e))),
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return finish(cfg.format, "config", Err(Failure::Input(e.into())));
        }
    }
    let (name, result) = match &cli.command {
        Command::Table { max_weight } => ("table", cmd_table(*max_weight)),
        Command::Solve { genus, symmetric } => ("solve", cmd_solve(*genus, *symmetric)),
        Command::Specialize { potential, order, genus } => {
            ("specialize", cmd_specialize(potential, order.unwrap_or(cfg.order), *genus))
        }
        Command::Verify { only, m } => ("verify", verify::run(*only, *m, &cfg)),
    };
    finish(cfg.format, name, result)
}

fn finish(format: Format, command: &str, result: Result<Report, Failure>) -> ExitCode {
    match result {
        Ok(report) => {
            match format {
                Format::Json => {
                    let mut map = report.json;
                    map.insert("schema_version".into(), json!(SCHEMA_VERSION));
                    map.insert("command".into(), json!(command));
                    map.insert("ok".into(), json!(report.failure.is_none()));
                    emit(&format!("{}\n", serde_json::to_string_pretty(&Value::Object(map)).unwrap()));
                }
                Format::Text => emit(&report.text),
            }
            match report.failure {
                None => ExitCode::SUCCESS,
                Some(msg) => {
                    eprintln!("verification failed: {msg}");
                    ExitCode::from(1)
                }
            }
        }
        Err(f) => {
            match format {
                Format::Json => {
                    let v = json!({
                        "schema_version": SCHEMA_VERSION,
                        "command": command,
                        "ok": false,
                        "error": {"kind": f.kind(), "message": f.message()},
                    });
                    emit(&format!("{}\n", serde_json::to_string_pretty(&v).unwrap()));
                }
                Format::Text => eprintln!("error ({}): {}", f.kind(), f.message()),
            }
            ExitCode::from(f.code())
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|_| out.flush());
}

fn cmd_table(max_weight: u32) -> Result<Report, Failure> {
    let table = generate_table(max_weight).map_err(|e| Failure::Generation(e.into()))?;
    let mut json = Map::new();
    json.insert("max_weight".into(), json!(max_weight));
    json.insert("rows".into(), json!(table.rows().len()));
    json.insert("entries".into(), table.to_json());
    Ok(Report { json, text: table.to_text(), failure: None })
}

fn log_text(l: &LogCombo) -> String {
    l.display_with(Names::UZ)
}

fn cmd_solve(genus: usize, symmetric: bool) -> Result<Report, Failure> {
    if genus == 0 {
        return Err(Failure::Input(anyhow!("genus must be at least 1")));
    }
    let full = build_table(genus).map_err(|e| Failure::Generation(e.into()))?;
    let table = if symmetric { full.symmetric() } else { full.clone() };
    let mut failures = Vec::new();
    for g in 1..=genus {
        for v in [Variant::A, Variant::B] {
            let mut r = residual(g, v, &table).map_err(|e| Failure::Generation(e.into()))?;
            let mut odd = odd_residual(g, v, &table).map_err(|e| Failure::Generation(e.into()))?;
            if symmetric {
                r = drop_u(&r);
                odd = drop_u(&odd);
            }
            if !r.is_zero() {
                failures.push(format!("back-substitution at genus {g}, variant {v}"));
            }
            if !odd.is_zero() {
                failures.push(format!("order {} residual, variant {v}", 2 * g + 1));
            }
        }
    }
    for v in grading_check(&full) {
        failures.push(format!("grading of {}: {}", v.entry, v.problem));
    }
    let z_list = table.z_list();
    let d2f = free_energy_relation(genus, &z_list);
    let candidate = match (genus, symmetric) {
        (1, true) => Some(parse_log_combo("1/12*log(z') - 1/12*log(z/x)").unwrap()),
        (2, true) => closed_form(2).map(|c| LogCombo::from_expr(drop_u(c.as_expr().unwrap()))),
        (g, false) => closed_form(g),
        _ => None,
    };
    let verification = candidate.as_ref().map(|c| verify_closed_form(genus, c, &z_list));
    if let Some(r) = &verification {
        if !r.equal {
            failures.push(format!("closed form for genus {genus}"));
        }
    }

    let g = genus;
    let show = |e: Option<stringforge_core::diffring::DiffExpr>| e.map(|e| e.display_with(Names::UZ).to_string());
    let entries = [
        (format!("z{g}"), show(table.z(g))),
        (format!("u{}", 2 * g), show(table.u(2 * g))),
        (format!("u{}", 2 * g + 1), show(table.u(2 * g + 1))),
    ];
    let mut json = Map::new();
    json.insert("genus".into(), json!(g));
    json.insert("symmetric".into(), json!(symmetric));
    for (k, v) in &entries {
        json.insert(k.clone(), json!(v));
    }
    json.insert("d2_free_energy".into(), json!(log_text(&d2f)));
    json.insert("free_energy".into(), json!(candidate.as_ref().map(log_text)));
    json.insert("verification".into(), verification.as_ref().map_or(Value::Null, |r| r.to_json()));
    json.insert("failures".into(), json!(failures));

    let mut text = String::new();
    for (k, v) in &entries {
        writeln!(text, "{k} = {}", v.as_deref().unwrap_or("?")).unwrap();
    }
    writeln!(text, "d_x^2 F^({g}) = {}", log_text(&d2f)).unwrap();
    match (&candidate, &verification) {
        (Some(c), Some(r)) => {
            writeln!(text, "F^({g}) = {}", log_text(c)).unwrap();
            writeln!(text, "closed form verified: {}", r.equal).unwrap();
        }
        _ => writeln!(text, "F^({g}): no closed form on file").unwrap(),
    }
    for f in &failures {
        writeln!(text, "FAILED: {f}").unwrap();
    }
    let failure = (!failures.is_empty()).then(|| failures.join("; "));
    Ok(Report { json, text, failure })
}

fn cmd_specialize(src: &str, order: u32, genus: u32) -> Result<Report, Failure> {
    let v = Potential::parse(src).with_context(|| format!("potential `{src}`")).map_err(Failure::Input)?;
    if genus > 2 {
        return Err(Failure::Input(anyhow!("{}", SpecializeError::NoClosedForm(genus))));
    }
    let run = || -> anyhow::Result<_> {
        let (u, z) = leading_order_series(&v, order)?;
        let f = free_energy_series(&v, genus, order)?;
        let mut counts = Vec::new();
        for t in profiles(&v, order) {
            for (faces, c) in map_count(&f, &v, &t)? {
                if !c.is_zero() {
                    counts.push((profile_of(&t), faces, c));
                }
            }
        }
        Ok((u, z, f, counts))
    };
    let (u, z, f, counts) = run().map_err(Failure::Generation)?;
    let (u, z, f) = (v.substitute_values(&u), v.substitute_values(&z), v.substitute_values(&f));

    let mut json = Map::new();
    json.insert("potential".into(), json!(v.to_string()));
    json.insert("order".into(), json!(order));
    json.insert("genus".into(), json!(genus));
    json.insert("u".into(), u.to_json());
    json.insert("z".into(), z.to_json());
    json.insert("free_energy".into(), f.to_json());
    let rows: Vec<Value> = counts
        .iter()
        .map(|(p, faces, c)| {
            let profile: Map<String, Value> = p.iter().map(|(j, n)| (j.to_string(), json!(n))).collect();
            json!({"profile": profile, "faces": faces, "count": c.to_string()})
        })
        .collect();
    json.insert("map_counts".into(), Value::Array(rows));

    let mut text = String::new();
    writeln!(text, "V = {v}").unwrap();
    writeln!(text, "u = {u}").unwrap();
    writeln!(text, "z = {z}").unwrap();
    writeln!(text, "F^({genus}) = {f}").unwrap();
    if !counts.is_empty() {
        writeln!(text, "genus {genus} maps:").unwrap();
        for (p, faces, c) in &counts {
            let label: Vec<String> = p.iter().map(|(j, n)| format!("{n}x{j}-valent")).collect();
            writeln!(text, "  {:<28} faces {faces:>2}: {c}", label.join(", ")).unwrap();
        }
    }
    Ok(Report { json, text, failure: None })
}
