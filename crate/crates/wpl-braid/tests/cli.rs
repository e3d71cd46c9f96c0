//! End-to-end checks of the command-line surface: subcommands, exit codes,
//! file round-trips, and output stability.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wpl-braid"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wpl_braid_cli_{name}"));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn lattice_dump() {
    let out = run(&["lattice", "--weights", "2,3"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["p"], 6);
    assert_eq!(v["n"], 5);
    assert_eq!(v["gram"][0][0], 1);
    assert_eq!(v["genus2"], -3);
}

#[test]
fn kappa_shape() {
    let out = run(&["kappa", "--weights", "2,2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 4);
    for (k, c) in classes.iter().enumerate() {
        for (j, x) in c.as_array().unwrap().iter().enumerate() {
            assert_eq!(x.as_i64().unwrap(), i64::from(j == k));
        }
    }
}

#[test]
fn weightless_type_works() {
    let out = run(&["lattice", "--weights", ""]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["n"], 2);
    assert_eq!(v["p"], 1);
}

#[test]
fn validate_round_trip_and_exit_codes() {
    let dir = tmpdir("validate");
    let kappa = run(&["kappa", "--weights", "2,2"]);
    let path = dir.join("kappa.json");
    fs::write(&path, &kappa.stdout).unwrap();

    let ok = run(&["validate", "--weights", "2,2", "--seq", path.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout_json(&ok)["ok"], true);

    // reversed pair fails with exit 1 and a violation report
    let bad = dir.join("bad.json");
    fs::write(
        &bad,
        r#"{"weights":[2,2],"classes":[[0,0,0,1],[1,0,0,0],[0,1,0,0],[0,0,1,0]]}"#,
    )
    .unwrap();
    let fail = run(&["validate", "--weights", "2,2", "--seq", bad.to_str().unwrap()]);
    assert_eq!(fail.status.code(), Some(1));
    assert_eq!(stdout_json(&fail)["ok"], false);

    // schema violation names the offending field and exits 2
    let schema = dir.join("schema.json");
    fs::write(
        &schema,
        r#"{"weights":[2,2],"classes":[[1,0,0,0],[0,1,0]]}"#,
    )
    .unwrap();
    let err = run(&["validate", "--weights", "2,2", "--seq", schema.to_str().unwrap()]);
    assert_eq!(err.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&err.stderr);
    assert!(msg.contains("classes[1]"), "{msg}");
}

#[test]
fn mutate_and_trace() {
    let out = run(&["mutate", "--weights", "2,2", "--word", "3 2 1"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    // helix rotation: first entry is the translate of O(c)
    assert_eq!(
        v["classes"][0],
        serde_json::json!([0, 1, 1, -1])
    );

    let traced = run(&[
        "mutate", "--weights", "2,2", "--word", "1 -1", "--trace", "--format", "csv",
    ]);
    assert!(traced.status.success());
    let text = String::from_utf8_lossy(&traced.stdout);
    let rows: Vec<&str> = text.trim().lines().collect();
    assert_eq!(rows[0], "step,letter,case,classes");
    assert_eq!(rows.len(), 3, "one row per mutation step: {text}");
    assert!(rows[1].starts_with("1,1,"));
    assert!(rows[2].starts_with("2,-1,"));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = run(&["mutate", "--weights", "2,2", "--word", "1", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn det_values() {
    let out = run(&["det", "--weights", "2,3,5"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["p"], 30);
    assert_eq!(v["det"].as_i64().unwrap().abs(), 30);
    assert_eq!(v["invariant_holds"], true);
    assert_eq!(v["config"]["subcommand"], "det");

    let walked = run(&[
        "det", "--weights", "2,2", "--words", "20", "--len", "15", "--seed", "3",
    ]);
    assert!(walked.status.success());
    assert_eq!(stdout_json(&walked)["invariant_holds"], true);
}

#[test]
fn helix_relations_rr_perp() {
    let h = run(&["helix", "--weights", "2,3", "--trials", "10", "--seed", "1"]);
    assert_eq!(h.status.code(), Some(0));
    assert_eq!(stdout_json(&h)["pass"], true);

    let r = run(&["relations", "--weights", "2,2", "--trials", "50", "--seed", "1"]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(stdout_json(&r)["pass"], true);

    let rr = run(&["rr-check", "--weights", "2,3", "--pairs", "50", "--seed", "1"]);
    assert_eq!(rr.status.code(), Some(0));
    let v = stdout_json(&rr);
    assert_eq!(v["pass"], true);
    assert_eq!(v["arm_values"], serde_json::json!([-3, -2]));

    let p = run(&["perp", "--weights", "2,3"]);
    assert_eq!(p.status.code(), Some(0));
    assert_eq!(stdout_json(&p)["ok"], true);

    let p2 = run(&["perp", "--weights", "3,3", "--line", "0;1,0"]);
    assert_eq!(p2.status.code(), Some(0));
    assert_eq!(stdout_json(&p2)["ok"], true);
}

#[test]
fn connect_finds_and_reports_budget() {
    let dir = tmpdir("connect");
    let kappa = run(&["kappa", "--weights", "2,2"]);
    let src = dir.join("src.json");
    fs::write(&src, &kappa.stdout).unwrap();
    let mutated = run(&["mutate", "--weights", "2,2", "--word", "2 -1 3"]);
    let dst = dir.join("dst.json");
    fs::write(&dst, &mutated.stdout).unwrap();

    for strategy in ["bfs", "recursive"] {
        let out = run(&[
            "connect",
            "--weights",
            "2,2",
            "--src",
            src.to_str().unwrap(),
            "--dst",
            dst.to_str().unwrap(),
            "--strategy",
            strategy,
        ]);
        assert_eq!(out.status.code(), Some(0), "{strategy}");
        let v = stdout_json(&out);
        assert_eq!(v["found"], true);
        // the word appears both as a letter array and in text form
        assert!(v["word"].is_array());
        let word = v["word_text"].as_str().unwrap().to_string();
        let letters: Vec<i64> = v["word"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_i64().unwrap())
            .collect();
        let from_text: Vec<i64> = word
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(letters, from_text);
        // replaying the word reproduces the destination
        let replay = run(&["mutate", "--weights", "2,2", "--word", &word]);
        assert_eq!(stdout_json(&replay), stdout_json(&mutated));
    }

    // tiny budget exhausts with exit 3
    let starved = run(&[
        "connect",
        "--weights",
        "2,2",
        "--src",
        src.to_str().unwrap(),
        "--dst",
        dst.to_str().unwrap(),
        "--strategy",
        "bfs",
        "--max-nodes",
        "1",
        "--max-depth",
        "1",
    ]);
    assert_eq!(starved.status.code(), Some(3));
    assert_eq!(stdout_json(&starved)["found"], false);
}

#[test]
fn sgd_baselines() {
    let p1 = run(&["sgd", "--weights", "", "--max-nodes", "10"]);
    assert!(p1.status.success());
    assert_eq!(stdout_json(&p1)["lower_bound"], 1);

    let d = run(&["sgd", "--weights", "2,2", "--max-nodes", "20000"]);
    assert!(d.status.success());
    let v = stdout_json(&d);
    assert_eq!(v["lower_bound"], 2);
    assert!(v["nodes_visited"].as_u64().unwrap() >= 1);
}

#[test]
fn orbit_census_output() {
    let out = run(&["orbit", "--weights", "2,2", "--max-nodes", "200", "--radius", "3"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["depth_counts"][0], 1);
    assert_eq!(v["config"]["subcommand"], "orbit");
}

#[test]
fn seeded_runs_are_reproducible() {
    let a = run(&["det", "--weights", "2,3", "--words", "10", "--len", "10", "--seed", "9"]);
    let b = run(&["det", "--weights", "2,3", "--words", "10", "--len", "10", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);

    let r1 = run(&["relations", "--weights", "2,3", "--trials", "30", "--seed", "4"]);
    let r2 = run(&["relations", "--weights", "2,3", "--trials", "30", "--seed", "4"]);
    assert_eq!(r1.stdout, r2.stdout);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tmpdir("config");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "weights=2,3\ntrials=5\nseed=11\n").unwrap();
    let out = bin()
        .args(["relations", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["trials"], 5);
    assert_eq!(v["config"]["seed"], 11);
    assert_eq!(v["config"]["weights"], serde_json::json!([2, 3]));
    // explicit flags override the file
    let over = bin()
        .args(["relations", "--config", cfg.to_str().unwrap(), "--trials", "7"])
        .output()
        .unwrap();
    assert_eq!(stdout_json(&over)["trials"], 7);
}

#[test]
fn bad_weights_are_usage_errors() {
    let out = run(&["lattice", "--weights", "1,3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["lattice", "--weights", "2,x"]);
    assert_eq!(out.status.code(), Some(2));
}
