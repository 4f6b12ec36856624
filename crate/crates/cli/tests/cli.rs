use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rado(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rado"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn construct(dir: &Path, family: &[&str], name: &str) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut args = vec!["construct"];
    args.extend_from_slice(family);
    args.extend(["-o", &path]);
    assert!(rado(&args).status.success());
    path
}

#[test]
fn kl_json_matches_reference_values() {
    let v = json(&rado(&["kl", "--tol", "1e-8", "--json"]));
    assert!((v["objective_min"].as_f64().unwrap() + 0.895227).abs() < 5e-5);
    assert!((v["theta_star"].as_f64().unwrap() - 1.45251).abs() < 1e-3);
    assert!((v["base"].as_f64().unwrap() - 2.44789).abs() < 1e-3);
}

#[test]
fn four_squares_select_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let fs = construct(dir.path(), &["four-squares"], "fs.json");
    let v = json(&rado(&["select", "--algo", "greedy", &fs, "--json"]));
    assert_eq!(v["density"].as_f64(), Some(0.25));
    assert_eq!(v["algorithm"], "greedy");

    let v = json(&rado(&["oracle", &fs, "--forbid", "0,1", "--json"]));
    assert_eq!(v["delta"].as_f64(), Some(0.25));
    let chosen = v["chosen"].as_array().unwrap();
    assert_eq!(chosen.len(), 1);
    assert!(chosen[0].as_u64().unwrap() >= 2);

    let out_path = dir.path().join("sel.json");
    let out = rado(&["select", "--algo", "sweep", &fs, "--json", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert!(v["density"].as_f64().unwrap() >= v["guarantee"].as_f64().unwrap());
}

#[test]
fn verify_ajtai_on_shipped_asset_and_four_squares() {
    let dir = tempfile::tempdir().unwrap();
    let a = construct(dir.path(), &["ajtai"], "a.json");
    let v = json(&rado(&["verify-ajtai", &a, "--json"]));
    assert_eq!(v["property1_holds"], true);
    assert_eq!(v["property2_holds"], true);

    let fs = construct(dir.path(), &["four-squares"], "fs.json");
    let v = json(&rado(&["verify-ajtai", &fs, "--rect", "-1,-1,1,1", "--json"]));
    assert_eq!(v["property1_holds"], true);
    assert_eq!(v["property2_holds"], false);

    let ac = construct(dir.path(), &["ajtai-composed"], "ac.json");
    let v = json(&rado(&["verify-ajtai", &ac, "--samples", "2000", "--json"]));
    assert!(v["best_density"].as_f64().unwrap() < 0.25);
}

#[test]
fn constructions_are_seeded() {
    let a = rado(&["construct", "translate-net", "--n", "50", "--seed", "9"]);
    let b = rado(&["construct", "translate-net", "--n", "50", "--seed", "9"]);
    let c = rado(&["construct", "translate-net", "--n", "50", "--seed", "10"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["bodies"].as_array().unwrap().len(), 50);
}

#[test]
fn bounds_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.csv");
    assert!(rado(&["bounds", "--dmax", "20", "--csv", path.to_str().unwrap()]).status.success());
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().next(), Some("name,d,value,side,note"));
    assert!(text.lines().any(|l| l.starts_with("sweep,2,")));
}

#[test]
fn bench_csv_is_deterministic() {
    let args = [
        "bench", "--dim", "2", "--n", "10", "--trials", "6", "--algos", "greedy,blichfeldt,nordlander,zalgaller",
        "--seed", "4", "--csv",
    ];
    let a = rado(&args);
    let b = rado(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 6 * 4);
}

#[test]
fn bench_reports_selector_errors_per_row() {
    let out = rado(&["bench", "--radii", "uniform:0.2,0.6", "--trials", "3", "--algos", "zalgaller,greedy"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().filter(|l| l.contains(",zalgaller,")).all(|l| l.contains("congruent")));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dimension\": 2, \"bodies\": [").unwrap();
    assert_eq!(rado(&["oracle", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(rado(&["oracle", "/nonexistent/c.json"]).status.code(), Some(2));
    assert_eq!(rado(&["select", "--algo", "nope", "x.json"]).status.code(), Some(2));

    let a = construct(dir.path(), &["ajtai"], "a.json");
    assert_eq!(rado(&["oracle", &a, "--forbid", "99"]).status.code(), Some(2));
    let pw = construct(dir.path(), &["pinwheel", "--n", "5"], "pw.json");
    assert_eq!(rado(&["select", "--algo", "rado1d", &pw]).status.code(), Some(2));
    assert_eq!(rado(&["kl", "--tol", "0"]).status.code(), Some(2));
}

#[test]
fn resource_caps_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let big = construct(dir.path(), &["translate-net", "--n", "20000"], "big.json");
    let out = rado(&["oracle", &big]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
