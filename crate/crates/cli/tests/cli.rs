use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hetpipe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hetpipe"))
        .args(args)
        .env_remove("HETPIPE_FIXTURES")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = hetpipe(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn herad_on_the_receiver() {
    let v = json(&[
        "schedule",
        "--strategy",
        "herad",
        "--chain",
        "orangepi5plus",
        "--platform",
        "2,2",
    ]);
    assert!((v["period"].as_f64().unwrap() - 7027.0).abs() <= 0.5);
    assert_eq!(v["big_used"], 2);
    assert_eq!(v["little_used"], 2);
    let mbps = v["throughput_mbps"].as_f64().unwrap();
    assert!((mbps - 8.1).abs() < 0.05, "{mbps}");
}

#[test]
fn text_schedule_reports_period_and_throughput() {
    let out = hetpipe(&[
        "schedule",
        "--strategy",
        "fertac",
        "--chain",
        "orangepi5plus",
        "--platform",
        "2,2",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("period 7250.8"), "{text}");
    assert!(text.contains("Mb/s"), "{text}");
}

#[test]
fn schedule_output_is_deterministic() {
    let args = [
        "--json",
        "schedule",
        "--strategy",
        "twocatac",
        "--chain",
        "x7ti",
        "--platform",
        "6,8",
    ];
    assert_eq!(hetpipe(&args).stdout, hetpipe(&args).stdout);
}

#[test]
fn buffers_follow_the_lcm_plan() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("s.json");
    fs::write(
        &sol,
        r#"{"period": 1.0, "stages": [
            {"first": 1, "last": 1, "r": 3, "v": "B"},
            {"first": 2, "last": 2, "r": 1, "v": "L"},
            {"first": 3, "last": 3, "r": 2, "v": "B"}]}"#,
    )
    .unwrap();
    assert_eq!(
        json(&["buffers", "--solution", path(&sol)])["links"],
        serde_json::json!([3, 2])
    );
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let out = hetpipe(&["gen", "--n", "9", "--sr", "0.5", "--seed", "42", "--out", path(p)]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let chain: Value = serde_json::from_slice(&fs::read(&a).unwrap()).unwrap();
    assert_eq!(chain["tasks"].as_array().unwrap().len(), 9);

    // A generated chain feeds straight into schedule and the oracle.
    let v = json(&[
        "schedule",
        "--strategy",
        "herad",
        "--chain",
        path(&a),
        "--platform",
        "1,2",
    ]);
    let o = json(&["oracle", "--chain", path(&a), "--platform", "1,2"]);
    let r = json(&["oracle", "--reverse", "--chain", path(&a), "--platform", "1,2"]);
    assert_eq!(o["min_period_exact"], r["min_period_exact"]);
    assert_eq!(v["period_exact"], o["min_period_exact"]);
}

#[test]
fn solution_json_round_trips_through_simulate_and_pin() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("s.json");
    let platform = dir.path().join("p.json");
    fs::write(
        &platform,
        r#"{"big": 2, "little": 2, "topology": {"clusters": [
            {"type": "B", "cores": [4, 5]}, {"type": "L", "cores": [0, 1]}]}}"#,
    )
    .unwrap();
    let out = hetpipe(&[
        "schedule",
        "--strategy",
        "herad",
        "--chain",
        "orangepi5plus",
        "--platform",
        path(&platform),
        "--out",
        path(&sol),
    ]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&fs::read(&sol).unwrap()).unwrap();
    assert_eq!(doc["stages"].as_array().unwrap().len(), 3);

    let sim = json(&[
        "simulate",
        "--chain",
        "orangepi5plus",
        "--platform",
        "2,2",
        "--solution",
        path(&sol),
        "--streams",
        "200",
        "--warmup",
        "50",
    ]);
    assert!(sim["links"].is_array());

    let pins = json(&[
        "pin",
        "--chain",
        "orangepi5plus",
        "--platform",
        path(&platform),
        "--solution",
        path(&sol),
        "--policy",
        "packed",
    ]);
    let threads = pins["threads"].as_array().unwrap();
    assert_eq!(threads.len(), 4);
}

#[test]
fn fixtures_are_listed() {
    let v = json(&["fixtures"]);
    let names: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["orangepi5plus", "macstudio", "ai370", "x7ti"]);
}

#[test]
fn fixture_directory_overrides_bundled_profiles() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("tiny.json"),
        r#"{"name": "tiny", "tasks": [{"id": 1, "wb": 2, "wl": 4, "rep": true}]}"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hetpipe"))
        .args([
            "--json",
            "schedule",
            "--strategy",
            "fertac",
            "--chain",
            "tiny",
            "--platform",
            "2,0",
        ])
        .env("HETPIPE_FIXTURES", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["period"].as_f64().unwrap(), 1.0);
}

#[test]
fn sweep_writes_runs_and_cells() {
    let dir = tempfile::tempdir().unwrap();
    let (runs, cells) = (dir.path().join("runs.csv"), dir.path().join("cells.csv"));
    let out = hetpipe(&[
        "sweep",
        "--chains",
        "5",
        "--n",
        "8",
        "--sr",
        "0.5",
        "--platforms",
        "2,2",
        "--threads",
        "1",
        "--out",
        path(&runs),
        "--stats",
        path(&cells),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // Header plus 5 chains times 5 strategies.
    assert_eq!(fs::read_to_string(&runs).unwrap().lines().count(), 26);
    assert_eq!(fs::read_to_string(&cells).unwrap().lines().count(), 6);
}

#[test]
fn bench_reports_one_row_per_point_and_strategy() {
    let v = json(&[
        "bench",
        "--n",
        "6,8",
        "--sr",
        "0.5",
        "--platforms",
        "2,2",
        "--strategies",
        "fertac,herad",
        "--reps",
        "2",
        "--threads",
        "2",
    ]);
    assert_eq!(v.as_array().unwrap().len(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(hetpipe(&["--help"]).status.code(), Some(0));
    assert_eq!(hetpipe(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        hetpipe(&[
            "schedule",
            "--strategy",
            "fertac",
            "--chain",
            "no-such-chain",
            "--platform",
            "2,2"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        hetpipe(&[
            "schedule",
            "--strategy",
            "fastest",
            "--chain",
            "orangepi5plus",
            "--platform",
            "2,2"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        hetpipe(&["oracle", "--chain", "orangepi5plus", "--platform", "2,2"])
            .status
            .code(),
        Some(1),
        "oversized instance is an input error"
    );
    let budget = hetpipe(&[
        "--json",
        "schedule",
        "--strategy",
        "twocatac",
        "--chain",
        "x7ti",
        "--platform",
        "6,8",
        "--max-expansions",
        "1",
    ]);
    assert_eq!(budget.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&budget.stderr).unwrap();
    assert_eq!(err["exit_code"], 2);
}
