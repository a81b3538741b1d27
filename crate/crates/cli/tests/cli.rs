use std::fs;
use std::process::{Command, Output};

fn dt4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dt4")).args(args).output().expect("spawn dt4")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn passing_check_exits_zero() {
    let out = dt4(&["verify", "toric", "--geometry", "c4", "--order", "3", "--threads", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("status: pass"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("[3]") && l.contains("yes")));
}

#[test]
fn computation_error_exits_one() {
    // two equal weights put fixed terms into the vertex of a two-box partition
    let dir = tempfile::tempdir().unwrap();
    let charts = dir.path().join("charts.json");
    fs::write(&charts, r#"{"name": "doubled", "charts": [{"weights": [[1,0,0],[1,0,0],[0,0,1],[-2,0,-1]]}]}"#).unwrap();
    let out = dt4(&["verify", "toric", "--charts", charts.to_str().unwrap(), "--order", "2"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("status: ERROR"));

    // a cache line that parses but carries a zero scalar
    let cache = dir.path().join("cache");
    fs::create_dir(&cache).unwrap();
    fs::write(
        cache.join("contributions.jsonl"),
        r#"{"partition":"0,0,0,0","geometry":"x","numerator":"0","factors":[],"sign":1}"#,
    )
    .unwrap();
    let out = dt4(&["verify", "toric", "--order", "1", "--cache", cache.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&dt4(&["verify", "orbifold", "--r", "0", "--order", "2"])), 2);
    assert_eq!(code(&dt4(&["verify", "toric"])), 2);
    assert_eq!(code(&dt4(&["verify", "toric", "--order", "2", "--prime", "7"])), 2);
    assert_eq!(code(&dt4(&["verify", "warp", "--order", "2"])), 2);
    assert_eq!(code(&dt4(&["inspect", "vertex", "--boxes", "0,0,0,1"])), 2);
    assert_eq!(code(&dt4(&["frobnicate"])), 2);
}

#[test]
fn degenerate_point_exits_three() {
    // s4 = -(1+1+5) vanishes mod 7
    let out = dt4(&[
        "verify", "toric", "--geometry", "c4", "--order", "1", "--mode", "modp", "--prime", "7", "--point", "1,1,5,2",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("vanishes"));
}

#[test]
fn modp_run_reports_bound() {
    let out = dt4(&["verify", "orbifold", "--r", "2", "--order", "2", "--mode", "modp", "--trials", "3", "--seed", "9"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("trials=3") && text.contains("seed=9") && text.contains("failure bound="), "{text}");
}

#[test]
fn inspect_single_box() {
    let out = dt4(&["inspect", "vertex", "--boxes", "0,0,0,0", "--r", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("size: 1"));
    assert!(text.contains("Z = 1"));
    assert!(text.contains("colors: [1, 0]"));
}

#[test]
fn partition_counts() {
    let out = dt4(&["partitions", "count", "--max", "6"]);
    assert_eq!(stdout(&out).trim(), "1 4 10 26 59 140");
    let out = dt4(&["partitions", "list", "--size", "2"]);
    assert_eq!(stdout(&out).lines().count(), 4);
}

#[test]
fn macmahon_series() {
    let out = dt4(&["series", "macmahon", "--order", "4"]);
    let lines: Vec<String> = stdout(&out).lines().map(String::from).collect();
    // M(-q) = 1 - q + 3q^2 - 6q^3 + 13q^4 - ...
    assert_eq!(lines, ["[0] 1", "[1] -1", "[2] 3", "[3] -6", "[4] 13"]);
}

#[test]
fn output_independent_of_threads() {
    let run = |t: &str| {
        let out = dt4(&["verify", "orbifold", "--r", "2", "--order", "3", "--threads", t, "--deterministic"]);
        assert_eq!(code(&out), 0);
        stdout(&out)
    };
    let one = run("1");
    assert_eq!(one, run("4"));
}

#[test]
fn suite_writes_combined_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let report = dir.path().join("report.json");
    fs::write(
        &cfg,
        format!(
            "order = 3\nr = 2\nchecks = [\"cpi\", \"alt-sign\", \"partition-count\"]\nreport = {:?}\ndeterministic = true\n",
            report.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = dt4(&["verify", "suite", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["status"], "pass");
    assert_eq!(doc["reports"].as_array().unwrap().len(), 3);
    assert!(doc["reports"][0].get("elapsed_ms").is_none());
}
