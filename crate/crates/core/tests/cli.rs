use std::process::{Command, Output};

use serde_json::Value;

fn ffgroup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffgroup"))
        .args(args)
        .env_remove("FFGROUP_BUDGET_POINTS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_main_json() {
    let o = ffgroup(&["verify", "main", "--q", "2", "--n", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["harness"], "main");
    assert_eq!(v["cases_total"], "6");
    assert_eq!(v["failures"], Value::Array(vec![]));
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        [
            "budget_hit",
            "cases_checked",
            "cases_total",
            "elapsed_ms",
            "failures",
            "harness",
            "params",
            "tool_version"
        ]
    );
}

#[test]
fn failing_harness_exits_one_with_witnesses() {
    let o = ffgroup(&["verify", "main", "--q", "3", "--n", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let f = &v["failures"][0];
    assert_eq!(f["f"], "2,1,1");
    assert_eq!(f["g"], "1,0,1");
    assert_eq!(f["observed"], "16");
    assert_eq!(f["expected"], "48");
}

#[test]
fn list_primitive_text() {
    let o = ffgroup(&["list", "primitive", "--q", "2", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1,1,0,1\n1,0,1,1\n");
    let o = ffgroup(&[
        "list",
        "nonzero-const",
        "--q",
        "2^1",
        "--n",
        "2",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v, serde_json::json!(["1,0,1", "1,1,1"]));
}

#[test]
fn order_from_generator_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gens.txt");
    // C_f and C_g for f = X^2+X+1, g = X^2+1 over F_2
    std::fs::write(&path, "# companions\n0 1\n1 1\n\n0 1\n1 0\n").unwrap();
    let o = ffgroup(&[
        "order",
        "--q",
        "2",
        "--n",
        "2",
        "--gens",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "6");
}

#[test]
fn malformed_generator_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "0 1\n1 1\n\n0 1\n1 x\n").unwrap();
    let o = ffgroup(&[
        "order",
        "--q",
        "2",
        "--n",
        "2",
        "--gens",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5"));
    let o = ffgroup(&[
        "order",
        "--q",
        "2",
        "--n",
        "2",
        "--gens",
        "/nonexistent/file",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["verify", "main", "--q", "6", "--n", "2"],
        vec!["verify", "main", "--q", "2"],
        vec!["verify", "main", "--q", "2", "--n", "2", "--bogus"],
        vec!["verify", "degos", "--p", "4", "--n", "2"],
        vec!["verify", "unique-ext", "--q", "2", "--n", "3", "--d", "2"],
        vec!["report", "--qmax", "3", "--nmax", "2"],
        vec!["verify", "main", "--q", "2", "--n", "2", "--workers", "0"],
        vec!["frobnicate"],
    ] {
        assert_eq!(ffgroup(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn budget_exits_three() {
    let o = ffgroup(&[
        "verify",
        "main",
        "--q",
        "2",
        "--n",
        "8",
        "--budget-points",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["budget_hit"], true);
    assert_eq!(v["cases_checked"], "0");
    let o = ffgroup(&["verify", "kantor", "--q", "2", "--n", "5"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn env_budget_and_flag_precedence() {
    let run = |env: &str, extra: &[&str]| {
        let mut args = vec!["verify", "singer-lemma", "--q", "2", "--n", "6"];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_ffgroup"))
            .args(&args)
            .env("FFGROUP_BUDGET_POINTS", env)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(run("32", &[]), Some(3));
    assert_eq!(run("32", &["--budget-points", "64"]), Some(0));
    assert_eq!(run("64", &[]), Some(0));
    assert_eq!(run("lots", &[]), Some(2));
}

#[test]
fn csv_and_text_projections() {
    let o = ffgroup(&[
        "verify",
        "singer-lemma",
        "--q",
        "3",
        "--n",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header[0], "harness");
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][2], "6");
    assert_eq!(&rows[0][4], "0");
    let o = ffgroup(&[
        "verify",
        "fixed-points",
        "--q",
        "2",
        "--a",
        "2",
        "--d",
        "2",
        "--format",
        "text",
    ]);
    assert!(stdout(&o).starts_with("PASS fixed-points"));
    assert!(stdout(&o).contains("max_fixed=4"));
}

#[test]
fn report_writes_json_array() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = ffgroup(&[
        "report",
        "--qmax",
        "3",
        "--nmax",
        "3",
        "--out",
        path.to_str().unwrap(),
        "--workers",
        "2",
    ]);
    // (3, 2) carries the n = 2 counterexamples
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let runs = v.as_array().unwrap();
    let harnesses: std::collections::BTreeSet<&str> = runs
        .iter()
        .map(|r| r["harness"].as_str().unwrap())
        .collect();
    assert_eq!(harnesses.len(), 7);
    let failing: Vec<(&str, &str)> = runs
        .iter()
        .filter(|r| !r["failures"].as_array().unwrap().is_empty())
        .map(|r| {
            (
                r["harness"].as_str().unwrap(),
                r["params"]["q"].as_str().unwrap(),
            )
        })
        .collect();
    assert_eq!(failing, [("main", "3"), ("two-companion", "3")]);
}

#[test]
fn help_exits_zero() {
    let o = ffgroup(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify main --q Q --n N"));
}
