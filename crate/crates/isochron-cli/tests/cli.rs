use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use isochron_cli::grid::default_scan_grid;
use isochron_cli::{run, Options, SystemSpec};
use serde_json::Value;
use tempfile::TempDir;

fn isochron(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isochron")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const CONDITION_I: &str = r#"{"n":2,"a":[[0,0],[0,0],[1,0],[1,0]]}"#;
const MIXED: &str = r#"{"n":2,"a":[[1,0],[0,0],[0,0],[1,0]]}"#;

#[test]
fn classify_examples() {
    let d = TempDir::new().unwrap();
    let cases = [
        (CONDITION_I, "ConditionI"),
        (r#"{"n":3,"a":[[0,0],[0,0],[1,0],[0,0],[0,0]]}"#, "Not"),
        (r#"{"n":2,"a":[[0,0],[0,0],[0,0],[0,0]]}"#, "Both"),
        (r#"{"n":3,"a":[["1/2","0"],["-3/7","1"],["0","0"],["0","0"],["0","0"]],"field":"exact"}"#, "ConditionII"),
    ];
    for (i, (spec, want)) in cases.iter().enumerate() {
        let out = isochron(&["classify", &write(d.path(), &format!("{i}.json"), spec)]);
        assert_eq!(out.status.code(), Some(0));
        let r = json(&out);
        assert_eq!(r["verdict"]["verdict"], *want, "{spec}");
        assert_eq!(r["verdict"]["consistent"], true);
    }
    let r = json(&isochron(&["classify", &write(d.path(), "n.json", cases[1].0)]));
    assert_eq!(r["verdict"]["witness"]["kind"], "resonant");
    assert_eq!(r["verdict"]["witness"]["j"], 2);
}

#[test]
fn report_has_the_documented_fields() {
    let d = TempDir::new().unwrap();
    let r = json(&isochron(&["critical-points", &write(d.path(), "m.json", MIXED)]));
    for k in ["verdict", "criticalPoints", "infinitePoints", "lambdaTable", "periodScan", "monodromy", "warnings"] {
        assert!(r.get(k).is_some(), "missing {k}");
    }
    let values: Vec<f64> = r["criticalPoints"]["atypicalValues"].as_array().unwrap().iter().map(|v| v[0].as_f64().unwrap()).collect();
    assert!(values.iter().any(|v| v.abs() < 1e-12));
    assert!(values.iter().any(|v| (v - 1.0 / 27.0).abs() < 1e-12), "{values:?}");
}

#[test]
fn hypothesis_not_met_exits_four() {
    let d = TempDir::new().unwrap();
    let out = isochron(&["verify", "infinity-cycles", &write(d.path(), "c.json", CONDITION_I)]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["error"]["kind"], "HypothesisNotMet");
}

#[test]
fn failed_assertion_exits_two() {
    // y^3 (x^4 + y^4): every infinity cycle measures 2 pi i, not 2 pi i / 2
    let d = TempDir::new().unwrap();
    let spec = r#"{"n":6,"a":[[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[1,0]]}"#;
    let out = isochron(&["verify", "infinity-cycles", &write(d.path(), "s.json", spec)]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["passed"] == false));
}

#[test]
fn numerical_failure_exits_three() {
    // the only grid point is the atypical value 1/27
    let d = TempDir::new().unwrap();
    let out = isochron(&["verify", "main", &write(d.path(), "m.json", MIXED), "--h-grid", "0.037037037037037035,0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn passing_verification_exits_zero() {
    let d = TempDir::new().unwrap();
    let out = isochron(&["verify", "main", &write(d.path(), "c.json", CONDITION_I), "--h-grid", "log:1e-3:1e-1:3:2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r["periodScan"]["statistic"].as_f64().unwrap() < 1e-8);
}

#[test]
fn scan_csv_of_a_linear_system() {
    let d = TempDir::new().unwrap();
    let spec = write(d.path(), "z.json", r#"{"n":2,"a":[[0,0],[0,0],[0,0],[0,0]]}"#);
    let csv_path = d.path().join("scan.csv");
    let out = isochron(&["periods", &spec, "--h-grid", "log:1e-3:1e-1:10:1", "--out", csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut rd = csv::Reader::from_path(&csv_path).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(header, ["h_re", "h_im", "T_re", "T_im", "|T−2πi|", "quadrature_error"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    for row in rows {
        assert!(row[4].parse::<f64>().unwrap() < 1e-12);
    }
}

#[test]
fn output_is_deterministic() {
    let d = TempDir::new().unwrap();
    let spec = write(d.path(), "m.json", r#"{"n":3,"a":[[0.4,0.1],[-0.2,0],[0.7,0],[0.1,0],[0.3,0]]}"#);
    let args = ["lambda", spec.as_str(), "--seed", "17"];
    let a = isochron(&args);
    let b = isochron(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let scan = ["periods", spec.as_str(), "--h-grid", "log:1e-3:1e-1:3:2"];
    let one = Command::new(env!("CARGO_BIN_EXE_isochron")).args(scan).env("ISOCHRON_THREADS", "1").output().unwrap();
    let three = Command::new(env!("CARGO_BIN_EXE_isochron")).args(scan).env("ISOCHRON_THREADS", "3").output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, three.stdout);
}

#[test]
fn spec_round_trips() {
    for text in [
        CONDITION_I,
        r#"{"n":3,"a":[["1/2","0"],["-3/7","1"],["0","0"],["0","0"],["5","-2/9"]],"field":"exact"}"#,
        r#"{"n":2,"a":[[0.25,-1.5],[0,0],[1e-3,0],[1,0]],"field":"float"}"#,
    ] {
        let spec = SystemSpec::parse(text).unwrap();
        let again = SystemSpec::parse(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(spec, again);
    }
}

#[test]
fn parse_errors_are_located() {
    let bad = [
        (r#"{"n":2,"a":[[0,0],[0,0],[1,0]]}"#, "expected n + 2 = 4 entries"),
        (r#"{"n":2,"a":[[0,0],[0,0],["x",0],[1,0]],"field":"exact"}"#, "a[2][0]"),
        (r#"{"n":1,"a":[[0,0],[0,0],[1,0]]}"#, "at least 2"),
        ("{\"n\":2,\n\"b\":[]}", "line 2"),
    ];
    for (text, needle) in bad {
        let e = SystemSpec::parse(text).unwrap_err();
        assert!(e.0.contains(needle), "{e} lacks {needle}");
    }
    let d = TempDir::new().unwrap();
    let out = isochron(&["classify", &write(d.path(), "bad.json", bad[0].0)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("entries"));
    assert_eq!(isochron(&["classify"]).status.code(), Some(1));
    assert_eq!(isochron(&["--help"]).status.code(), Some(0));
}

#[test]
fn batch_mode_reports_every_file() {
    let d = TempDir::new().unwrap();
    write(d.path(), "a.json", CONDITION_I);
    write(d.path(), "b.json", MIXED);
    write(d.path(), "c.json", "{");
    write(d.path(), "notes.txt", "ignored");
    let out = isochron(&["classify", d.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    let entries = r.as_array().unwrap();
    assert_eq!(entries.len(), 3);
    assert_eq!(entries[0]["file"], "a.json");
    assert_eq!(entries[0]["report"]["verdict"]["verdict"], "ConditionI");
    assert_eq!(entries[1]["report"]["verdict"]["verdict"], "Not");
    assert!(entries[2]["error"].is_string());
}

#[test]
fn field_override_changes_the_arithmetic() {
    let spec = SystemSpec::parse(CONDITION_I).unwrap();
    let opts = Options { field: Some(isochron_cli::Field::Exact), h_grid: Some(default_scan_grid()), ..Options::default() };
    let r = run(&spec, isochron_cli::Command::Classify, &opts);
    assert_eq!(r.exit_code, 0);
    assert!(spec.system(Some(isochron_cli::Field::Exact)).unwrap().is_exact());
}
