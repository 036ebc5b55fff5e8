use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn aqo(store: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aqo"))
        .arg("--store")
        .arg(store)
        .args(args)
        .env_remove("AQO_STORE")
        .output()
        .expect("binary runs")
}

fn ok(store: &Path, args: &[&str]) -> String {
    let out = aqo(store, args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn benchmark_program_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path();
    ok(s, &["benchmark", "program"]);
    let program = json(&s.join("benchmark.program.json"));
    assert_eq!(program["T"], 30.0);
    assert_eq!(program["qubits"].as_array().unwrap().len(), 8);

    let stdout = ok(s, &["run", "--program", "benchmark", "--shots", "100", "--seed", "3"]);
    assert!(stdout.contains("11 snapshots"), "{stdout}");
    let run = s.join("benchmark.run");
    for k in 0..11 {
        assert!(run.join(format!("snapshot_{k}.json")).is_file());
    }
    assert!(run.join("gap.json").is_file());
    assert!(run.join("samples.json").is_file());

    let result = json(&s.join("benchmark.result.json"));
    let (top, p) = {
        let first = &result["distribution"][0];
        (first[0].as_u64().unwrap(), first[1].as_f64().unwrap())
    };
    assert_eq!(top, 15);
    assert!((p - 0.0679).abs() < 1e-3, "{p}");
    assert!((result["norm"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn zero_plugin_writes_spectra_but_no_result() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path();
    ok(s, &["benchmark", "program", "--out", "b"]);
    ok(s, &["run", "--program", "b", "--plugin", "zero", "--eigenstates", "4"]);
    assert!(!s.join("b.result.json").exists());
    let snap = json(&s.join("b.run/snapshot_10.json"));
    assert_eq!(snap["t"], 30.0);
    assert_eq!(snap["eigenvalues"].as_array().unwrap().len(), 4);
    assert!(snap.get("amplitudes").is_none());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path();
    assert_eq!(aqo(s, &["run", "--program", "x", "--dt-evolve", "0"]).status.code(), Some(2));
    assert_eq!(aqo(s, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(aqo(s, &["problem", "create", "--out", "p"]).status.code(), Some(2));

    let missing = aqo(s, &["run", "--program", "nope"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope"));

    fs::write(s.join("asym.json"), "[[0, 1], [2, 0]]").unwrap();
    let asym = aqo(s, &["problem", "create", "--qubo", s.join("asym.json").to_str().unwrap(), "--out", "a"]);
    assert_eq!(asym.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&asym.stderr).contains("entry (0, 1) = 1 but (1, 0) = 2"));
}

#[test]
fn complete_graph_on_nine_vertices_does_not_fit_one_cell() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path();
    let n = 9;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { -1.0 } else { 1.0 }).collect())
        .collect();
    fs::write(s.join("k9.json"), serde_json::to_string(&rows).unwrap()).unwrap();
    ok(s, &["problem", "create", "--qubo", s.join("k9.json").to_str().unwrap(), "--out", "k9"]);
    ok(s, &["processor", "chimera", "--rows", "1", "--cols", "1", "--out", "c"]);
    let out = aqo(s, &["program", "synth", "--problem", "k9", "--processor", "c", "--out", "k9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!s.join("k9.program.json").exists());
}

#[test]
fn solve_matches_the_manual_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path();
    fs::write(s.join("p.bop"), "1 : b1 AND b2\n-2 : b1 OR b3\n1 : NOT b3\n").unwrap();
    ok(s, &["problem", "create", "--bop", s.join("p.bop").to_str().unwrap(), "--out", "p"]);
    ok(s, &["processor", "chimera", "--rows", "1", "--cols", "1", "--out", "c"]);

    let engine = ["--T", "10", "--dt-evolve", "0.001", "--dt-anneal", "0.05", "--snapshots", "1"];
    let mut solve = vec!["solve", "--problem", "p", "--processor", "c", "--out", "auto"];
    solve.extend(engine);
    ok(s, &solve);

    ok(s, &["embed", "--problem", "p", "--processor", "c", "--out", "manual"]);
    ok(s, &["program", "synth", "--problem", "p", "--processor", "c", "--embedding", "manual", "--T", "10", "--out", "manual"]);
    ok(s, &["run", "--program", "manual", "--dt-evolve", "0.001", "--dt-anneal", "0.05", "--snapshots", "1"]);

    assert_eq!(json(&s.join("auto.embedding.json")), json(&s.join("manual.embedding.json")));
    assert_eq!(json(&s.join("auto.program.json")), json(&s.join("manual.program.json")));
    assert_eq!(json(&s.join("auto.result.json")), json(&s.join("manual.result.json")));

    let solution = json(&s.join("auto.solution.json"));
    assert_eq!(solution["bop_value"], -2.0);
    assert_eq!(solution["bits"][2], 1);
}

#[test]
fn rerunning_a_command_gives_identical_entities() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path();
    ok(s, &["processor", "chimera", "--rows", "2", "--cols", "1", "--out", "c"]);
    let first = fs::read(s.join("c.processor.json")).unwrap();
    ok(s, &["processor", "chimera", "--rows", "2", "--cols", "1", "--out", "c"]);
    assert_eq!(first, fs::read(s.join("c.processor.json")).unwrap());

    ok(s, &["benchmark", "ising", "--out", s.join("b.json").to_str().unwrap()]);
    ok(s, &["program", "physical", "--ising", s.join("b.json").to_str().unwrap(), "--processor", "c", "--qubits", "0,4,1,5,6,2,7,3", "--out", "phys"]);
    let prog = fs::read(s.join("phys.program.json")).unwrap();
    ok(s, &["program", "physical", "--ising", s.join("b.json").to_str().unwrap(), "--processor", "c", "--qubits", "0,4,1,5,6,2,7,3", "--out", "phys"]);
    assert_eq!(prog, fs::read(s.join("phys.program.json")).unwrap());
}
