use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fqdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqdist"))
        .args(args)
        .output()
        .expect("spawn fqdist")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn check_passed(r: &Value, name: &str) -> u64 {
    r["perCheck"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no tally {name}"))["passed"]
        .as_u64()
        .unwrap()
}

#[test]
fn gauss_f9_and_f5() {
    let out = fqdist(&["gauss", "--p", "3", "--ell", "2"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["command"], "gauss");
    assert!((r["results"]["direct"]["re"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert!((r["results"]["closed"]["re"].as_f64().unwrap() - 3.0).abs() < 1e-9);

    let r = report(&fqdist(&["gauss", "--p", "5"]));
    assert!((r["results"]["direct"]["re"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-9);
}

#[test]
fn even_characteristic_is_a_usage_error() {
    let out = fqdist(&["gauss", "--p", "2", "--ell", "2"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("even"));
}

#[test]
fn bad_arguments_exit_1() {
    assert_eq!(code(&fqdist(&["verify", "--p", "3"])), 1);
    assert_eq!(code(&fqdist(&["no-such-command"])), 1);
    assert_eq!(code(&fqdist(&["--help"])), 0);
}

#[test]
fn verify_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let out = fqdist(&[
        "verify",
        "--p",
        "5",
        "--d",
        "2",
        "--trials",
        "30",
        "--seed",
        "7",
        "--out",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(r["violations"].as_array().unwrap().len(), 0);
    assert!(check_passed(&r, "spectral.prediction") >= 30);
    assert_eq!(r["config"]["seed"], 7);
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("subject,size,sq,zr"));
    assert!(table.lines().count() > 30);
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn analyze_files() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.txt");
    let out = fqdist(&[
        "generate",
        "--p",
        "3",
        "--d",
        "2",
        "--spec",
        r#"{"kind":"fullSpace"}"#,
        "--to",
        full.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = fqdist(&["analyze", full.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["results"]["pairCounts"]["sq"], 36);
    assert_eq!(r["results"]["pairCounts"]["zr"], 9);
    for b in r["results"]["bounds"].as_array().unwrap() {
        assert_eq!(b["slack"], "0/1");
    }

    // Round trip: the set embedded in the report reproduces the same numbers.
    let again = dir.path().join("again.txt");
    write(&again, r["results"]["set"].as_str().unwrap());
    let r2 = report(&fqdist(&["analyze", again.to_str().unwrap()]));
    assert_eq!(r2["results"]["pairCounts"], r["results"]["pairCounts"]);
    assert_eq!(r2["results"]["spectralMass"], r["results"]["spectralMass"]);
    assert_eq!(r2["results"]["bounds"], r["results"]["bounds"]);

    let single = dir.path().join("one.txt");
    write(&single, "fq p=5 ell=1 d=3 mod=0,1\n1,2,3\n");
    let r = report(&fqdist(&["analyze", single.to_str().unwrap()]));
    assert_eq!(r["results"]["pairCounts"]["sq"], 0);
    assert_eq!(r["results"]["pairCounts"]["zr"], 1);

    let bad = dir.path().join("bad.txt");
    write(&bad, "fq p=5 ell=1 d=2 mod=0,1\n1,2\n1\n");
    let out = fqdist(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = fqdist(&["analyze", dir.path().join("missing.txt").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn search_square_writes_witness() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    let out = fqdist(&[
        "search-square",
        "--p",
        "5",
        "--d",
        "2",
        "--restarts",
        "100",
        "--witness",
        w.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["results"]["size"], 5);
    assert_eq!(r["results"]["bound"], "5/1");
    let r = report(&fqdist(&["analyze", w.to_str().unwrap()]));
    assert_eq!(r["results"]["isSquareDistanceSet"], true);

    let r = report(&fqdist(&[
        "search-square",
        "--p",
        "3",
        "--d",
        "2",
        "--strategy",
        "exhaustive",
    ]));
    assert!(r["results"]["size"].as_u64().unwrap() <= 3);
    assert_eq!(r["results"]["search"]["exact"], true);

    let r = report(&fqdist(&[
        "search-square",
        "--p",
        "3",
        "--d",
        "3",
        "--restarts",
        "20",
    ]));
    assert!(r["results"]["size"].as_u64().unwrap() <= 5);
}

#[test]
fn coverage_command() {
    let out = fqdist(&[
        "coverage", "--p", "5", "--d", "2", "--size", "25", "--seeds", "1,2",
    ]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["results"]["perSeed"].as_array().unwrap().len(), 2);
    assert_eq!(r["results"]["perSeed"][0]["coverage"], 1.0);
}
