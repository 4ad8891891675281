use std::collections::BTreeMap;
use std::process::{Command, Output};

use serde_json::Value;
use stringforge_core::maps::enumerate_maps;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stringforge"))
        .args(args)
        .env_remove("STRINGFORGE_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = run(&full);
    let v = serde_json::from_slice(&out.stdout).expect("valid json");
    (out.status.code().unwrap(), v)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn table_sizes() {
    let (code, v) = json(&["table", "--max-weight", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["rows"], 18);
    assert_eq!(v["schema_version"], 1);
    let (_, v0) = json(&["table", "--max-weight", "0"]);
    assert_eq!(v0["rows"], 1);
    assert_eq!(v0["entries"][0]["lambda"], Value::Array(vec![]));
    let (code, v4) = json(&["table", "--max-weight", "4"]);
    assert_eq!(code, 0);
    assert!(v4["rows"].as_u64().unwrap() > 18);
}

#[test]
fn solve_genus_one() {
    let out = run(&["solve", "--genus", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("F^(1) = (1/24)*log(-(u')^2*z + (z')^2) - (1/12)*log(z/x)"), "{text}");
    assert!(text.contains("closed form verified: true"));

    let out = run(&["solve", "--genus", "1", "--symmetric"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("F^(1) = (1/12)*log(z') - (1/12)*log(z/x)"), "{text}");
    assert!(text.contains("u2 = 0"));
}

#[test]
fn solve_genus_two_verifies() {
    let (code, v) = json(&["solve", "--genus", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["verification"]["equal"], true);
    assert_eq!(v["failures"], Value::Array(vec![]));
    assert!(v["z2"].as_str().unwrap().contains("z'"));
    let (code, v) = json(&["solve", "--genus", "2", "--symmetric"]);
    assert_eq!(code, 0);
    assert_eq!(v["verification"]["equal"], true);
}

fn counts(v: &Value) -> Vec<(BTreeMap<usize, u32>, u64, String)> {
    v["map_counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            let profile = r["profile"]
                .as_object()
                .unwrap()
                .iter()
                .map(|(j, n)| (j.parse().unwrap(), n.as_u64().unwrap() as u32))
                .collect();
            (profile, r["faces"].as_u64().unwrap(), r["count"].as_str().unwrap().to_string())
        })
        .collect()
}

#[test]
fn specialize_quartic_genus_one() {
    let (code, v) = json(&["specialize", "-V", "0.5*l^2+t4*l^4", "--genus", "1", "--order", "3"]);
    assert_eq!(code, 0);
    let rows = counts(&v);
    let one_vertex = rows.iter().find(|(p, _, _)| p == &BTreeMap::from([(4, 1)])).unwrap();
    assert_eq!((one_vertex.1, one_vertex.2.as_str()), (1, "1"));
    // F^(1) carries -t4 x at first order
    let f = v["free_energy"].as_array().unwrap();
    assert!(f.iter().any(|t| t["coeff"] == "-1" && t["x_exponent"] == "1"));
}

#[test]
fn specialize_cubic_matches_enumeration() {
    let (code, v) = json(&["specialize", "-V", "0.5*l^2+t3*l^3", "--genus", "0", "--order", "4"]);
    assert_eq!(code, 0);
    let rows = counts(&v);
    assert!(!rows.is_empty());
    for (profile, faces, count) in rows {
        let p: Vec<(usize, u32)> = profile.into_iter().collect();
        let oracle = enumerate_maps(&p, 0).unwrap();
        assert_eq!(oracle.get(&(faces as u32)).map(|c| c.to_string()), Some(count), "{p:?}");
    }
}

#[test]
fn specialize_gaussian_is_zero() {
    let (code, v) = json(&["specialize", "-V", "0.5*l^2", "--genus", "1", "--order", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["free_energy"], Value::Array(vec![]));
    assert_eq!(v["map_counts"], Value::Array(vec![]));
}

#[test]
fn verify_suite() {
    let out = run(&["verify"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("pass")).count(), 9);
    let out = run(&["verify", "--only", "unwinding", "--m", "5"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("m = 1..5"));
    let out = run(&["verify", "--only", "table"]);
    assert!(out.status.success());
}

#[test]
fn exit_codes_for_bad_input() {
    assert_eq!(run(&["specialize", "-V", "t4*l^4"]).status.code(), Some(3));
    assert_eq!(run(&["specialize", "-V", "0.5*l^2", "--genus", "3"]).status.code(), Some(3));
    assert_eq!(run(&["solve", "--genus", "0"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["verify", "--only", "table", "--m", "2"]).status.code(), Some(3));
    assert_eq!(run(&["table", "--config", "/nonexistent/sf.conf"]).status.code(), Some(3));
    let (code, v) = json(&["specialize", "-V", "0.5*l^2 + t3*l^4"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "input");
    assert!(run(&["--help"]).status.success());
}

#[test]
fn unwinding_failure_is_reported() {
    // m = 0 is not a valid unwinding index and is reported as a failed check
    let out = run(&["verify", "--only", "unwinding", "--m", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("unwinding"));
}

#[test]
fn json_is_independent_of_thread_count() {
    for args in [&["solve", "--genus", "2"][..], &["table", "--max-weight", "3"][..], &["verify"][..]] {
        let mut a = args.to_vec();
        a.extend(["--format", "json", "--threads", "1"]);
        let one = run(&a).stdout;
        let n = a.len();
        a[n - 1] = "4";
        assert_eq!(one, run(&a).stdout, "{args:?}");
    }
}

#[test]
fn config_file_overrides_flags() {
    let path = std::env::temp_dir().join(format!("sf-cli-{}.conf", std::process::id()));
    std::fs::write(&path, "format = json\nthreads = 2\n").unwrap();
    let out = run(&["table", "--max-weight", "0", "--format", "text", "--config", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn env_threads_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_stringforge"))
        .args(["table", "--max-weight", "0"])
        .env("STRINGFORGE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
