//! End-to-end behaviour of the command-line tool.

use std::path::PathBuf;
use std::process::{Command, Output};

use gtbcd::io::{bundle_to_json, matrix_market_entries, operator_from_json, patterns_from_json, patterns_to_json, render};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gtbcd")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn dim_examples() {
    assert_eq!(stdout(&run(&["dim", "--family", "B", "--rank", "2", "--hw", "1,0"])).trim(), "5");
    assert_eq!(stdout(&run(&["dim", "--family", "C", "--rank", "1", "--hw", "0"])).trim(), "1");
    assert_eq!(stdout(&run(&["dim", "--family", "B", "--rank", "2", "--hw", "3/2,1/2"])).trim(), "16");
    assert_eq!(stdout(&run(&["dim", "--family", "D", "--rank", "2", "--hw", "1,-1"])).trim(), "3");
}

#[test]
fn patterns_example_has_four_records() {
    let o = run(&["patterns", "--family", "D", "--rank", "2", "--hw", "1,0"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ps = patterns_from_json(&v).unwrap();
    assert_eq!(ps.len(), 4);
    assert_eq!(render(&patterns_to_json(&ps)), stdout(&o));
}

#[test]
fn usage_errors_exit_two() {
    let cases: [&[&str]; 4] = [
        &["wigner", "--family", "B", "--rank", "2", "--hw", "1,0", "--shift", "7"],
        &["op", "--family", "B", "--rank", "2", "--hw", "1,0", "--gen", "5,1"],
        &["dim", "--family", "B", "--rank", "2", "--hw", "1,2"],
        &["op", "--family", "A", "--rank", "2", "--hw", "1,0", "--gen", "-1,-2"],
    ];
    for args in cases {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn operator_export_round_trips_and_matches_matrix_market() {
    let base = ["op", "--family", "B", "--rank", "2", "--hw", "1,0", "--gen", "-1,-2"];
    let json_text = stdout(&run(&base));
    let op = operator_from_json(&serde_json::from_str(&json_text).unwrap()).unwrap();
    assert_eq!(render(&gtbcd::io::operator_to_json(&op)), json_text);
    let mtx = stdout(&run(&[&base[..], &["--format", "mtx"]].concat()));
    assert!(mtx.lines().nth(1).unwrap().contains("lossy"));
    let entries = matrix_market_entries(&mtx).unwrap();
    assert_eq!(entries.len(), op.matrix.entries.len());
    for (r, c, v) in entries {
        assert!((v - op.matrix.entries[&(r, c)].to_f64()).abs() <= 1e-15);
    }
}

#[test]
fn cartan_export_is_diagonal() {
    let o = run(&["op", "--family", "C", "--rank", "2", "--hw", "2,1", "--gen", "-2,-2"]);
    let op = operator_from_json(&serde_json::from_str(&stdout(&o)).unwrap()).unwrap();
    assert!(op.matrix.entries.keys().all(|(r, c)| r == c));
}

#[test]
fn outputs_are_deterministic() {
    let args = ["wigner", "--family", "C", "--rank", "2", "--hw", "1,1", "--shift", "-2"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

fn bundle_file(name: &str, corrupt: bool) -> PathBuf {
    let label = gtbcd::algebra::AlgebraLabel::new(gtbcd::algebra::Family::B, 2).unwrap();
    let hw = gtbcd::algebra::DominantWeight::parse(&label, "1,1").unwrap();
    let rep = gtbcd::action::Representation::new(label, hw.components()).unwrap();
    let mut operators: std::collections::BTreeMap<_, _> =
        rep.all_operators().unwrap().into_iter().map(|(g, m)| (g, (*m).clone())).collect();
    if corrupt {
        let g = gtbcd::algebra::GeneratorId::new(0, -1);
        operators.get_mut(&g).unwrap().add_to(3, 1, &gtbcd::numeric::AlgebraicValue::one());
    }
    let bundle = gtbcd::io::OperatorBundle { label, highest_weight: hw.components().to_vec(), operators };
    let path = scratch(name);
    std::fs::write(&path, render(&bundle_to_json(&bundle))).unwrap();
    path
}

#[test]
fn verify_operator_bundles() {
    let good = bundle_file("good_bundle.json", false);
    assert_eq!(run(&["verify", "--input", good.to_str().unwrap()]).status.code(), Some(0));
    let bad = bundle_file("bad_bundle.json", true);
    let o = run(&["verify", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["cases"][0]["status"], "fail");
    assert!(report["cases"][0]["witness"].is_string());
}

#[test]
fn verify_rejects_an_interlacing_violation() {
    let o = run(&["patterns", "--family", "B", "--rank", "2", "--hw", "2,1"]);
    let mut v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // Level-1 row above its primed bound.
    v[0]["rows"][2][0] = serde_json::Value::String("5".into());
    let path = scratch("bad_patterns.json");
    std::fs::write(&path, render(&v)).unwrap();
    assert_eq!(run(&["verify", "--input", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn verify_single_module_suite() {
    let o = run(&["verify", "--suite", "casimir", "--family", "B", "--rank", "2", "--hw", "1,0"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["cases"][0]["notes"][0], "eigenvalue 4");
}

/// The full grid is red only on the gl-equivalence suite; the CLI reports it
/// with exit status 1.
#[test]
fn verify_all_reports_the_gl_equivalence_failures() {
    let o = run(&["verify", "--suite", "all"]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let failing: Vec<&str> = report["cases"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .map(|c| c["check"].as_str().unwrap())
        .collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|c| *c == "gl_equivalence"), "{failing:?}");
}
