mod common;

use common::fixture;
use std::path::Path;
use std::process::{Command, Output};

fn pas_opt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pas-opt"))
        .args(args)
        .env("PAS_OPT_LOG", "error")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_instance(dir: &Path, rooms: &str, disciplines: &str, timeslots: &str) {
    std::fs::write(dir.join("rooms.csv"), rooms).unwrap();
    std::fs::write(dir.join("disciplines.csv"), disciplines).unwrap();
    std::fs::write(dir.join("timeslots.csv"), timeslots).unwrap();
}

#[test]
fn validate_accepts_fixtures() {
    for name in ["tiny", "six-rooms", "synthetic"] {
        let o = pas_opt(&["validate", s(&fixture(name))]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn counting_bound_instance_is_a_model_error() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(
        dir.path(),
        "id,block,kind,capacity,floor\nr1,A,conventional,30,1\n",
        "id,frequency,pcd,eligible_rooms\na,2,0,\nb,1,1,\n",
        "id,day,order\nt1,mon,1\nt2,mon,2\n",
    );
    let o = pas_opt(&["validate", s(dir.path())]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("CountingBound"));
    let out = dir.path().join("out");
    assert_eq!(code(&pas_opt(&["solve", s(dir.path()), "--out", s(&out)])), 1);
    assert!(!out.join("solution.json").exists());
}

#[test]
fn unreadable_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nothing-here");
    assert_eq!(code(&pas_opt(&["validate", s(&missing)])), 2);
    assert_eq!(code(&pas_opt(&["solve", s(&fixture("tiny")), "--alpha", "1.5"])), 2);
    assert_eq!(code(&pas_opt(&["sweep", s(&fixture("tiny")), "--grid", "0,1", "--step", "0.5"])), 2);
}

#[test]
fn solve_defaults_to_half_and_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = pas_opt(&["solve", s(&fixture("tiny")), "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["alpha"], 0.5);
    let solution: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("solution.json")).unwrap()).unwrap();
    assert_eq!(solution["alpha"], 0.5);
    assert_eq!(solution["breakdown"]["fo"], 2.5);
    assert_eq!(solution["stats"]["proven_optimal"], true);
}

#[test]
fn sweep_csv_satisfies_weighted_sum() {
    let dir = tempfile::tempdir().unwrap();
    let o = pas_opt(&["sweep", s(&fixture("six-rooms")), "--step", "0.5", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("calibration.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>()[..6], ["alpha", "fo", "obj1", "obj2", "w1", "w2"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        let f = |i: usize| r[i].parse::<f64>().unwrap();
        let (alpha, fo, obj1, obj2, w1, w2) = (f(0), f(1), f(2), f(3), f(4), f(5));
        assert!((fo - ((1.0 - alpha) * obj1 + alpha * obj2)).abs() <= 1e-4);
        assert!((w1 + w2 - fo).abs() <= 1e-4);
    }
    for a in ["0.0000", "0.5000", "1.0000"] {
        assert!(dir.path().join(format!("solutions/alpha-{a}.json")).exists());
    }
}

#[test]
fn report_columns_follow_solutions() {
    let dir = tempfile::tempdir().unwrap();
    let sweep_out = dir.path().join("sweep");
    assert_eq!(code(&pas_opt(&["sweep", s(&fixture("tiny")), "--out", s(&sweep_out)])), 0);
    let mut args = vec!["report".to_string(), s(&fixture("tiny")).to_string()];
    for a in ["0.0000", "0.2500", "0.5000", "0.7500", "1.0000"] {
        args.push("--solution".into());
        args.push(s(&sweep_out.join(format!("solutions/alpha-{a}.json"))).into());
    }
    let report_out = dir.path().join("report");
    args.extend(["--out".into(), s(&report_out).into()]);
    let o = pas_opt(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let heatmap = std::fs::read_to_string(report_out.join("heatmap.csv")).unwrap();
    for line in heatmap.lines() {
        assert_eq!(line.split(',').count(), 6, "{line}");
    }
    assert_eq!(heatmap.lines().count(), 1 + 3);
    assert!(!report_out.join("comparison.txt").exists());
    assert!(!report_out.join("comparison.csv").exists());
}

#[test]
fn report_with_baseline_writes_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let inst = fixture("synthetic");
    let solve_out = dir.path().join("solve");
    assert_eq!(code(&pas_opt(&["solve", s(&inst), "--alpha", "0", "--out", s(&solve_out)])), 0);
    let out = dir.path().join("report");
    let o = pas_opt(&[
        "report",
        s(&inst),
        "--solution",
        s(&solve_out.join("solution.json")),
        "--baseline",
        s(&inst.join("baseline.csv")),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("comparison.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "rooms,23,8,-15"), "{csv}");
    assert!(out.join("comparison.txt").exists());
}

#[test]
fn mismatched_ids_are_a_model_error() {
    let dir = tempfile::tempdir().unwrap();
    let solve_out = dir.path().join("solve");
    assert_eq!(code(&pas_opt(&["solve", s(&fixture("tiny")), "--out", s(&solve_out)])), 0);
    let o = pas_opt(&[
        "report",
        s(&fixture("six-rooms")),
        "--solution",
        s(&solve_out.join("solution.json")),
        "--out",
        s(&dir.path().join("r")),
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn oracle_agrees_with_solve() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(code(&pas_opt(&["solve", s(&fixture("tiny")), "--alpha", "0.25", "--out", s(&a)])), 0);
    assert_eq!(code(&pas_opt(&["oracle", s(&fixture("tiny")), "--alpha", "0.25", "--out", s(&b)])), 0);
    let read = |p: std::path::PathBuf| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
    };
    assert_eq!(read(a.join("solution.json"))["breakdown"]["fo"], read(b.join("oracle.json"))["breakdown"]["fo"]);
}

#[test]
fn node_limit_exits_three_with_incumbent() {
    let dir = tempfile::tempdir().unwrap();
    let o = pas_opt(&[
        "solve",
        s(&fixture("synthetic")),
        "--same-room",
        "--max-nodes",
        "1",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let solution: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("solution.json")).unwrap()).unwrap();
    assert_eq!(solution["stats"]["proven_optimal"], false);
    assert!(solution["stats"]["bound"].as_f64().unwrap() <= solution["breakdown"]["fo"].as_f64().unwrap());
}
