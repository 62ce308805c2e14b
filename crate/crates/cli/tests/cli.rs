use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn optomech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optomech"))
        .args(args)
        .env("OPTOMECH_THREADS", "1")
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const TINY: &str = r#"{
  "name": "tiny",
  "space": {"c1": 3, "m": 2, "c2": 3},
  "params": {"Omega1": [2.0, 2.0], "Omega2": [2.0, 2.0]},
  "initial_state": {"c1": {"fock": 1}},
  "run": {"time_evolution": {"t1": 1.0, "samples": 5}},
  "measurements": [
    {"fidelity": {"reference": "c1", "target": "c2"}},
    {"number": {"mode": "m"}},
    {"wigner": {"mode": "c2", "times": [1.0], "grid": {"resolution": 16}}}
  ]
}"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn list_scenarios_shows_the_library() {
    let o = optomech(&["list-scenarios"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 14);
    for name in ["fig2a", "fig3_sweep", "fig6c", "table1_matrix", "rwa_validation"] {
        assert!(out.lines().any(|l| l.starts_with(name)), "{name} missing:\n{out}");
    }
}

#[test]
fn validate_accepts_files_and_library_names() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "tiny.json", TINY);
    assert_eq!(code(&optomech(&["validate", &path])), 0);
    assert_eq!(code(&optomech(&["validate", "fig5a"])), 0);
}

#[test]
fn exit_codes_follow_error_classes() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "unknown.json", &TINY.replace("\"samples\"", "\"sample\""));
    let o = optomech(&["validate", &unknown]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("sample"));

    let missing = dir.path().join("absent.json");
    assert_eq!(code(&optomech(&["validate", missing.to_str().unwrap()])), 3);

    assert_eq!(code(&optomech(&["run"])), 1);
    assert_eq!(code(&optomech(&["frobnicate"])), 1);

    // Marching stops long before the slow cavity has relaxed.
    let slow = r#"{
      "name": "slow",
      "space": {"c1": 3, "m": 2, "c2": 2},
      "params": {"g": [0, 0], "kappa_a": [0.01, 0.01]},
      "initial_state": {"c1": {"fock": 2}},
      "dissipation": {"enabled": true},
      "run": {"steady_state": {"criteria": {"window": 0.5, "check_every": 0.5, "max_time": 1.0}}},
      "measurements": [{"number": {"mode": "c1"}}]
    }"#;
    let slow = write(dir.path(), "slow.json", slow);
    let out = dir.path().join("slow_out");
    assert_eq!(code(&optomech(&["run", &slow, "--out", out.to_str().unwrap()])), 2);
}

#[test]
fn run_writes_results_wigner_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "tiny.json", TINY);
    let out = dir.path().join("out");
    let o = optomech(&[
        "run",
        &path,
        "--out",
        out.to_str().unwrap(),
        "--set",
        "params.q=0.1",
        "--truncation",
        "m=3",
        "--tolerance",
        "1e-9",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,F_c2,n_m"));
    assert_eq!(lines.count(), 5);

    let wigner = fs::read_to_string(out.join("wigner_c2_t1.0000.csv")).unwrap();
    assert_eq!(wigner.lines().count(), 1 + 16 * 16);

    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["params"]["q"], 0.1);
    assert_eq!(meta["config"]["space"]["m"], 3);
    assert_eq!(meta["config"]["run"]["time_evolution"]["rtol"], 1e-9);
    assert!(meta["t2"].as_f64().is_some());
}
