use std::process::{Command, Output};

use serde_json::Value;

fn epgaps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epgaps"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let o = epgaps(args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn text(args: &[&str]) -> String {
    let o = epgaps(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}");
    String::from_utf8(o.stdout).unwrap()
}

#[test]
fn one_signed_form() {
    let v = json(&["form", "--coeffs", "1,-1", "--limit", "1000"]);
    assert_eq!(v["classification"], "ONE_SIGNED");
    assert_eq!(v["sign_changes"], 0);
    assert_eq!(v["forced_sign"], -1);
}

#[test]
fn second_difference_changes_sign() {
    let v = json(&[
        "form",
        "--coeffs",
        "-1,2,-1",
        "--limit",
        "1000",
        "--positions",
        "5",
    ]);
    assert_eq!(v["classification"], "MIXED_SIGN");
    assert!(v["sign_changes"].as_u64().unwrap() >= 100);
    assert_eq!(v["positions"].as_array().unwrap().len(), 5);
    assert_eq!(v["positions_truncated"], true);
}

#[test]
fn form_csv_rows() {
    let out = text(&[
        "form", "--coeffs", "1,-2,1", "--limit", "3", "--format", "csv",
    ]);
    // T_n = p_{n+1} - 2 p_{n+2} + p_{n+3} = d_{n+3} - d_{n+2}.
    assert_eq!(out, "n,T_n\n1,0\n2,2\n3,-2\n");
}

#[test]
fn ept_params_example() {
    let v = json(&["ept", "params", "--ell", "1"]);
    for (key, want) in [("L", 3), ("m", 153), ("J", 79), ("k", 4898), ("K", 1)] {
        assert_eq!(v[key], want, "{key}");
    }
    assert_eq!(v["identities"]["holds"], true);
    assert_eq!(json(&["ept-params", "--ell", "1"]), v);
}

#[test]
fn ept_verify_passes() {
    let o = epgaps(&["ept", "verify", "--ell", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["monotonicity"]["violation_count"], 0);
    assert_eq!(v["monotonicity"]["min_exponent"], "1/4898");
    assert_eq!(v["monotonicity"]["max_exponent"], "1/2");
}

#[test]
fn verify_over_budget_is_an_error() {
    let o = epgaps(&["ept", "verify", "--ell", "1", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(1));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"], "budget");
}

#[test]
fn simulation_below_the_bound_is_not_gated() {
    let v = json(&[
        "ept",
        "simulate",
        "--toy",
        "3,4,1,3",
        "--exhaustive",
        "--min-occupied",
        "5",
    ]);
    assert!(
        v["failures_no_column"].as_u64().unwrap() + v["failures_sparse_later"].as_u64().unwrap()
            > 0
    );
    assert_eq!(v["guaranteed_occupancy"], 9);
    assert_eq!(v["passed"], true);
}

#[test]
fn trace_is_line_delimited() {
    let out = text(&[
        "ept", "simulate", "--ell", "1", "--trials", "20", "--seed", "3", "--trace",
    ]);
    let lines: Vec<Value> = out
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 21);
    assert_eq!(lines[0]["trial"], 0);
    assert_eq!(lines[20]["evaluated"], 20);
    assert_eq!(lines[20]["seed"], 3);
}

#[test]
fn seeds_matter() {
    let a = text(&[
        "ept", "simulate", "--ell", "1", "--trials", "30", "--seed", "1", "--trace",
    ]);
    let b = text(&[
        "ept", "simulate", "--ell", "1", "--trials", "30", "--seed", "2", "--trace",
    ]);
    assert_ne!(a, b);
}

#[test]
fn csv_headers() {
    assert!(
        text(&["gaps", "--limit", "10", "--format", "csv"]).starts_with("n,p,d\n2,3,1\n3,5,2\n")
    );
    assert_eq!(text(&["sieve", "--limit", "1", "--format", "csv"]), "n,p\n");
    let rec = text(&["records", "--limit", "200", "--c1", "0", "--format", "csv"]);
    assert!(rec.starts_with("m,p,d,ratio_num,ratio_den,normalized\n"));
    assert!(rec.contains("31,127,14,14,4,3.500000000000\n"));
    let sd = text(&["superdominant", "--limit", "110", "--format", "csv"]);
    assert_eq!(sd, "n,p,d,d_next,d_next2\n25,97,8,4,2\n");
}

#[test]
fn tuple_reports() {
    let v = json(&["tuple", "--h", "0,2,4"]);
    assert_eq!(v["admissible"], false);
    assert_eq!(v["witness"], 3);
    let v = json(&["tuple", "--h", "0,2,6", "--w", "3"]);
    assert_eq!(v["admissible"], true);
    assert_eq!(v["smooth"], true);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    std::fs::write(&path, "0 4\n6, 10\n").unwrap();
    let v = json(&["tuple", "--h-file", path.to_str().unwrap(), "--w", "2"]);
    assert_eq!(v["h"], serde_json::json!([0, 4, 6, 10]));
    assert_eq!(v["offending_prime"], 3);
}

#[test]
fn realization_csv_covers_every_index() {
    let out = text(&[
        "tuple", "--ell", "1", "--log-n", "30", "--w", "5", "--format", "csv",
    ]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("i,nu,mu,lambda,c,b,h"));
    assert_eq!(lines.count(), 2449);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let o = epgaps(&[
        "ept",
        "params",
        "--ell",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["J"], 111);
}

#[test]
fn exit_codes() {
    assert_eq!(epgaps(&["--frobnicate"]).status.code(), Some(64));
    assert_eq!(
        epgaps(&["form", "--coeffs", "1,x", "--limit", "5"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(epgaps(&["sieve"]).status.code(), Some(64));
    assert_eq!(epgaps(&["--help"]).status.code(), Some(0));
    assert_eq!(epgaps(&["--version"]).status.code(), Some(0));

    let o = epgaps(&["form", "--coeffs", "5", "--limit", "10"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    let e: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(e["error"], "contract");

    let o = epgaps(&["sieve", "--limit", "10000000000000"]);
    assert_eq!(o.status.code(), Some(1));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"], "range");

    assert_eq!(epgaps(&["tuple", "--h", "3,1"]).status.code(), Some(1));
    assert_eq!(
        epgaps(&["ept", "simulate", "--toy", "3,4,1"]).status.code(),
        Some(1)
    );
}
