use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn rlsort(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlsort"))
        .current_dir(dir)
        .env_remove("RLSORT_CONFIG")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn learned(dir: &TempDir) -> String {
    let out = rlsort(dir.path(), &["learn", "--out", "theta.json"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    "theta.json".into()
}

#[test]
fn learn_writes_negative_weights_deterministically() {
    let dir = TempDir::new().unwrap();
    learned(&dir);
    let first = fs::read(dir.path().join("theta.json")).unwrap();
    let json: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert!(json["theta"][0].as_f64().unwrap() < 0.0);
    assert!(json["theta"][1].as_f64().unwrap() < 0.0);
    learned(&dir);
    assert_eq!(first, fs::read(dir.path().join("theta.json")).unwrap());
}

#[test]
fn learn_into_missing_directory_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = rlsort(dir.path(), &["learn", "--out", "nope/theta.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flags_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        rlsort(dir.path(), &["sort", "--bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(rlsort(dir.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn sort_prints_result_and_writes_traces() {
    let dir = TempDir::new().unwrap();
    let theta = learned(&dir);
    let out = rlsort(
        dir.path(),
        &[
            "sort",
            "--params",
            &theta,
            "--array",
            "3 1 2",
            "--trace",
            "t.csv",
            "--heatmap",
            "h.csv",
            "--check",
        ],
    );
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("1 2 3"));
    assert_eq!(lines.next(), Some("moves: 1"));
    assert_eq!(lines.next(), Some("termination: sorted_detected"));
    let trace = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(trace.starts_with("step,i,j,value,f1\n0,,,"));
    assert_eq!(trace.lines().count(), 3);
    let heat = fs::read_to_string(dir.path().join("h.csv")).unwrap();
    assert_eq!(heat.lines().next(), Some("step,x1,x2,x3"));
    assert_eq!(heat.lines().last(), Some("1,1,2,3"));
}

#[test]
fn sorted_input_makes_no_moves() {
    let dir = TempDir::new().unwrap();
    let theta = learned(&dir);
    fs::write(dir.path().join("in.txt"), "1 2\n3 4\n").unwrap();
    let out = rlsort(
        dir.path(),
        &["sort", "--params", &theta, "--input", "in.txt"],
    );
    assert!(stdout(&out).contains("moves: 0"));
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let theta = learned(&dir);
    let out = rlsort(
        dir.path(),
        &["sort", "--params", &theta, "--array", "1 x 3"],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = rlsort(
        dir.path(),
        &["sort", "--params", "missing.json", "--array", "1 2"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_check_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let theta = learned(&dir);
    // every comparison lies, so the agent parks the array in descending order
    let out = rlsort(
        dir.path(),
        &[
            "sort", "--params", &theta, "--array", "1 2 3", "--p", "1", "--check",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let theta = learned(&dir);
    let args = [
        "bench", "--params", &theta, "--dims", "5,10", "--trials", "10", "--out",
    ];
    let run = |name: &str| {
        let mut a = args.to_vec();
        a.push(name);
        assert!(rlsort(dir.path(), &a).status.success());
        fs::read(dir.path().join(name)).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with(
        "algorithm,dataset,dim,p,moves_mean,moves_stddev,error_mean,error_stddev,success_rate"
    ));
    assert_eq!(text.lines().count(), 1 + 4 * 4 * 2 * 2);
    for line in text
        .lines()
        .skip(1)
        .filter(|l| l.contains(",0,") && !l.starts_with("quick"))
    {
        let cols: Vec<&str> = line.split(',').collect();
        if cols[3] == "0" {
            assert_eq!(cols[6], "0", "{line}");
        }
    }
}

#[test]
fn resilience_sweeps_the_grid() {
    let dir = TempDir::new().unwrap();
    let theta = learned(&dir);
    let out = rlsort(
        dir.path(),
        &[
            "resilience",
            "--params",
            &theta,
            "--trials",
            "10",
            "--fault-rates",
            "0,0.05,0.5",
            "--out",
            "r.csv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("algorithm,dim,p,success_rate,error_mean,error_stddev,trials")
    );
    assert_eq!(text.lines().count(), 1 + 3 * 3);
    let quick_faulty = text
        .lines()
        .find(|l| l.starts_with("quick,10,0.05,"))
        .unwrap();
    assert!(
        quick_faulty
            .split(',')
            .nth(3)
            .unwrap()
            .parse::<f64>()
            .unwrap()
            < 1.0
    );
}

#[test]
fn analyze_reports_json() {
    let dir = TempDir::new().unwrap();
    let theta = learned(&dir);
    rlsort(
        dir.path(),
        &[
            "sort",
            "--params",
            &theta,
            "--array",
            "5 1 4 2 3",
            "--trace",
            "t.csv",
        ],
    );
    let out = rlsort(
        dir.path(),
        &[
            "analyze",
            "--params",
            &theta,
            "--array",
            "10 9 1 2 3 4 5 6 7 8",
            "--trace-csv",
            "t.csv",
            "--check",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["k"], 2);
    assert_eq!(r["monotonic_violations"], serde_json::json!([]));
    let total = r["g"].as_u64().unwrap() + r["n"].as_u64().unwrap() + r["w"].as_u64().unwrap();
    assert_eq!(total, 100);
    let out = rlsort(
        dir.path(),
        &["analyze", "--params", &theta, "--array", "1 2 3"],
    );
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["g"], 0);
}

#[test]
fn analyze_check_flags_setbacks() {
    let dir = TempDir::new().unwrap();
    let theta = learned(&dir);
    fs::write(
        dir.path().join("bad.csv"),
        "step,i,j,value,f1\n0,,,-3,2\n1,1,2,-1,1\n2,2,1,-2,1\n",
    )
    .unwrap();
    let out = rlsort(
        dir.path(),
        &[
            "analyze",
            "--params",
            &theta,
            "--array",
            "2 1",
            "--trace-csv",
            "bad.csv",
            "--check",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["monotonic_violations"], serde_json::json!([2]));
}

#[test]
fn config_file_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"learn": {"seed": 3, "iterations": 4}}"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rlsort"))
        .current_dir(dir.path())
        .env("RLSORT_CONFIG", "cfg.json")
        .args(["learn", "--out", "theta.json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("theta.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 3);
    assert_eq!(json["provenance"]["iterations"], 4);

    fs::write(dir.path().join("bad.json"), r#"{"learn": {"sede": 3}}"#).unwrap();
    let out = rlsort(
        dir.path(),
        &["--config", "bad.json", "learn", "--out", "x.json"],
    );
    assert_eq!(out.status.code(), Some(2));
}
