use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Output, Stdio};

use pccsens::datagen::{sample, DistributionKind, DistributionSpec};
use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pccsens"));
    cmd.env_remove("SENS_SEED");
    cmd
}

fn run_with(cmd: &mut Command, stdin: &str) -> Output {
    let mut child = cmd
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const FLAT: &str = "x,y\n0,0\n1,1\n2,0\n";

#[test]
fn analyze_reports_the_fixture() {
    let out = run_with(bin().args(["analyze", "--bounds", "0,2,0,1"]), FLAT);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("note:"));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    let mut want = vec!["r", "p", "delta_r", "delta_p", "straddle", "witness_r", "witness_p", "candidates"];
    want.sort();
    let mut got = keys.clone();
    got.sort();
    assert_eq!(got, want);

    assert!((v["delta_r"].as_f64().unwrap() - 1.0 / 11f64.sqrt()).abs() < 1e-12);
    assert_eq!(v["witness_r"]["label"], "corner-lu");
    assert_eq!(v["witness_r"]["x"], 0.0);
    assert_eq!(v["witness_r"]["y"], 1.0);
    assert_eq!(v["straddle"], true);
    assert_eq!(v["p"], 1.0);
    assert_eq!(v["candidates"].as_array().unwrap().len(), 4);
    for c in v["candidates"].as_array().unwrap() {
        for k in ["x", "y", "label", "r_aug", "p_aug"] {
            assert!(c.get(k).is_some(), "candidate missing {k}");
        }
    }
}

#[test]
fn stationary_witness_has_no_coordinates() {
    let week = "x,y\n1,1\n2,1\n3,2\n4,1\n5,2\n";
    let out = run_with(bin().args(["analyze", "--bounds", "0,5,0,2"]), week);
    assert_eq!(out.status.code(), Some(0));
    assert!(!stderr(&out).contains("note:"));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let wp = v["witness_p"].as_object().unwrap();
    assert_eq!(wp["label"], "stationary");
    assert_eq!(wp["p_aug"], 1.0);
    assert!(!wp.contains_key("x") && !wp.contains_key("y"));
    let (p, dp) = (v["p"].as_f64().unwrap(), v["delta_p"].as_f64().unwrap());
    assert!((p + dp - 1.0).abs() <= 1e-12);
}

#[test]
fn synth_round_trips_through_analyze() {
    let synth = bin().args(["synth", "--kind", "gaussian", "--n", "25", "--seed", "7"]).output().unwrap();
    assert_eq!(synth.status.code(), Some(0));
    let csv = stdout(&synth);

    let expected = sample(&DistributionSpec {
        kind: DistributionKind::Gaussian,
        size: 25,
        seed: 7,
    })
    .unwrap();
    let parsed: Vec<(f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect();
    assert_eq!(parsed.len(), 25);
    for (p, q) in expected.iter().zip(&parsed) {
        assert_eq!(p.x.to_bits(), q.0.to_bits());
        assert_eq!(p.y.to_bits(), q.1.to_bits());
    }

    let a = run_with(bin().args(["analyze", "--bounds", "auto"]), &csv);
    let b = run_with(bin().args(["analyze", "--bounds", "auto"]), &csv);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_defaults_from_environment() {
    let with_env = bin().env("SENS_SEED", "42").args(["synth", "--n", "5"]).output().unwrap();
    let with_flag = bin().args(["synth", "--n", "5", "--seed", "42"]).output().unwrap();
    let other = bin().args(["synth", "--n", "5", "--seed", "43"]).output().unwrap();
    assert_eq!(with_env.stdout, with_flag.stdout);
    assert_ne!(with_env.stdout, other.stdout);
}

#[test]
fn malformed_row_is_an_input_error_naming_the_line() {
    let out = run_with(bin().arg("analyze"), "x,y\n0,0\n1,1\n# note\n2,zero\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 5"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
}

#[test]
fn too_little_data_is_an_input_error() {
    let out = run_with(bin().arg("analyze"), "x,y\n0,0\n1,1\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("p-value undefined"), "{}", stderr(&out));
    let out = run_with(bin().arg("analyze"), "x,y\n1,0\n1,1\n1,2\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("degenerate variance"));
}

#[test]
fn bad_bounds_are_rejected() {
    let out = run_with(bin().args(["analyze", "--bounds", "2,0,0,1"]), FLAT);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reads_a_crlf_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    std::fs::write(&path, "# header comment\r\nx,y\r\n0,0\r\n1,1\r\n2,0\r\n").unwrap();
    let out = bin()
        .args(["analyze", "--bounds", "0,2,0,1", "--format", "csv", "--input"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("r,p,delta_r,delta_p,straddle"));
    assert!(lines.next().unwrap().starts_with("0.0,1.0,0.3015113445777636"));

    let missing = bin().args(["analyze", "--input", "/nonexistent/data.csv"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn oracle_agrees_on_a_corner_optimum() {
    let out = run_with(bin().args(["oracle", "--bounds", "0,2,0,1", "--grid", "101"]), FLAT);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["agree_within"].as_f64().unwrap() <= 1e-5);
    assert_eq!(v["grid_resolution"], 101);
}

#[test]
fn stream_emits_each_record_before_end_of_input() {
    let mut child = bin()
        .args(["stream", "--bounds", "-5,5,-5,5"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut input = child.stdin.take().unwrap();
    let mut output = BufReader::new(child.stdout.take().unwrap());
    writeln!(input, "x,y").unwrap();

    let rows = [(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (1.0, 3.0), (4.0, 4.0), (9.0, -9.0)];
    for (i, (x, y)) in rows.iter().enumerate() {
        writeln!(input, "{x},{y}").unwrap();
        input.flush().unwrap();
        // the record for this row must arrive while stdin is still open
        let mut line = String::new();
        output.read_line(&mut line).unwrap();
        let v: Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["index"], i as u64);
        if i < 3 {
            assert_eq!(v["status"], "warmup");
            assert!(v["report_before"].is_null());
        } else {
            assert_eq!(v["status"], "ok");
            let bound = v["report_before"]["delta_r"].as_f64().unwrap();
            let seen = v["observed_delta_r"].as_f64().unwrap();
            if v["point_in_region"] == true {
                assert!(seen <= bound + 1e-9);
                assert_eq!(v["within_prediction"], true);
            }
        }
    }
    drop(input);
    let status = child.wait().unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn stream_auto_bounds_follow_the_data_seen_so_far() {
    let out = run_with(bin().args(["stream", "--format", "csv"]), "x,y\n0,0\n1,1\n2,0\n1,0.5\n10,10\n");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[0].starts_with("index,x,y,status"));
    // (1, 0.5) is inside the box of the first three rows, (10, 10) is not
    assert!(rows[4].ends_with(",true"), "{}", rows[4]);
    assert!(rows[5].ends_with(",false"), "{}", rows[5]);
}

#[test]
fn bench_reports_every_cell() {
    let out = bin()
        .args(["bench", "--trials", "3", "--sizes", "10,20", "--kind", "uniform,dirichlet", "--seed", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["trials"], 12);
    assert_eq!(v["cells"].as_array().unwrap().len(), 4);
    assert_eq!(v["seed"], 5);
}

#[test]
fn unknown_kind_is_rejected() {
    let out = bin().args(["synth", "--kind", "cauchy", "--n", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
