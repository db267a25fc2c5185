use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rendezvous"))
        .args(args)
        .env_remove("RDV_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn fixture(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    fs::read_to_string(path).expect("fixture exists")
}

#[test]
fn solve_one_gift() {
    let v = stdout_json(&run(&["solve", "--game", "g1", "--distance", "16", "--drop2", "4"]));
    assert_eq!(v["value"], "21/1");
    assert!(v["optimal_bundles"].as_array().unwrap().len() > 1);
}

#[test]
fn solve_accepts_decimal_and_fraction_inputs() {
    let a = stdout_json(&run(&["solve", "--game", "g1", "--drop2", "3.99968", "--value-only"]));
    let b = stdout_json(&run(&["solve", "--game", "g1", "--drop2", "24998/6250", "--value-only"]));
    assert_eq!(a["value"], "262503/12500");
    assert_eq!(a["value"], b["value"]);
}

#[test]
fn eval_reproduces_solver_value() {
    let dir = tempfile::tempdir().unwrap();
    let result = dir.path().join("solve.json");
    for (game, drops) in [("g1", vec!["--drop2", "4"]), ("g2and", vec!["--drop1", "0", "--drop2", "0"])] {
        let mut args = vec!["solve", "--game", game, "--out", result.to_str().unwrap()];
        args.extend(drops);
        assert!(run(&args).status.success());
        let solved: Value = serde_json::from_str(&fs::read_to_string(&result).unwrap()).unwrap();
        for index in 0..solved["optimal_bundles"].as_array().unwrap().len() {
            let out = stdout_json(&run(&[
                "eval",
                "--game",
                game,
                "--bundle",
                result.to_str().unwrap(),
                "--index",
                &index.to_string(),
            ]));
            assert_eq!(out["value"], solved["value"], "{game} bundle {index}");
        }
    }
}

#[test]
fn eval_no_gift_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.json");
    let bundle = r#"{"drop_i": null, "drop_ii": null,
        "player_i": {"t": "0", "obs": "ROOT", "x": "0", "dir": 1,
            "children": [{"t": "16", "obs": "TURN", "x": "16", "dir": -1}]},
        "player_ii": {"t": "0", "obs": "ROOT", "x": "0", "dir": 1,
            "children": [{"t": "8", "obs": "TURN", "x": "8", "dir": -1,
                "children": [{"t": "16", "obs": "TURN", "x": "0", "dir": 1,
                    "children": [{"t": "32", "obs": "TURN", "x": "16", "dir": -1}]}]}]}}"#;
    fs::write(&path, bundle).unwrap();
    let v = stdout_json(&run(&["eval", "--game", "g", "--bundle", path.to_str().unwrap()]));
    assert_eq!(v["value"], "26/1");
    assert_eq!(v["ordered_times"], serde_json::json!(["8/1", "16/1", "32/1", "48/1"]));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["solve", "--game", "g1", "--drop2", "1e3"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--game", "g7"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--game", "g1", "--distance", "0", "--drop2", "1"]).status.code(), Some(3));
    assert_eq!(
        run(&["solve", "--game", "g1", "--drop2", "4", "--horizon", "10"]).status.code(),
        Some(4)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(
        run(&["eval", "--game", "g", "--bundle", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn mesh_bracket_and_audit_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g2and.csv");
    let csv_s = csv.to_str().unwrap();
    let mesh = ["mesh", "--game", "g2and", "--range", "0:16", "--step", "1/2", "--out", csv_s];
    let out = run(&mesh);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 1 + 33 * 33);

    // never overwritten without --resume; resuming a complete file is a no-op
    assert_eq!(run(&mesh).status.code(), Some(2));
    let before = fs::read(&csv).unwrap();
    let mut resume = mesh.to_vec();
    resume.push("--resume");
    assert!(run(&resume).status.success());
    assert_eq!(fs::read(&csv).unwrap(), before);

    let report = stdout_json(&run(&["bracket", "--input", csv_s]));
    assert_eq!(report["x_min"], "24/1");
    let lower = |c: &Value| (c["lower"][0].as_str().unwrap().to_string(), c["lower"][1].as_str().unwrap().to_string());
    let cells: Vec<(String, String)> = report["candidates"].as_array().unwrap().iter().map(lower).collect();
    assert!(cells.contains(&("0/1".into(), "0/1".into())), "cell at the origin");
    let near = |a: &str| cells.iter().any(|c| c.0 == a);
    assert!(near("15/2") || near("8/1"), "cell next to (8, 8)");
    assert!(near("7/2") || near("4/1"), "tau1 = 4 stripe");

    let audit = stdout_json(&run(&["audit", "--input", csv_s]));
    assert_eq!(audit["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn mesh_output_is_byte_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for workers in ["1", "4"] {
        let path = dir.path().join(format!("w{workers}.csv"));
        let out = run(&[
            "mesh", "--game", "g1", "--range", "0:8", "--step", "1/4", "--workers", workers, "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        bytes.push(fs::read(&path).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn repro_matches_checked_in_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["repro", "all", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["table1", "table2", "table3", "exclusion_or", "exclusion_and"] {
        let file = format!("{name}.json");
        let got = fs::read_to_string(dir.path().join(&file)).unwrap();
        assert_eq!(got, fixture(&file), "{file} drifted from its fixture");
    }
}

#[test]
fn repro_table1_rows() {
    let v = stdout_json(&run(&["repro", "table1"]));
    let rows = v["rows"].as_array().unwrap();
    let intervals: Vec<(String, String)> = rows
        .iter()
        .map(|r| {
            (
                r["interval"][0]["decimal"].as_str().unwrap().to_string(),
                r["interval"][1]["decimal"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    let expected = [("26", "26"), ("20.99984", "21"), ("19.99968", "20"), ("23.99968", "24")];
    for (got, want) in intervals.iter().zip(expected) {
        assert_eq!((got.0.as_str(), got.1.as_str()), want);
    }
}
