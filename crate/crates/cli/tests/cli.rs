use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sepsys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepsys")).args(args).env_remove("SEPSYS_SEED").output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const TWO_EDGE_PATH: &str = r#"{"elements":["a","a*","b","b*"],"inverse":[["a","a*"],["b","b*"]],"leq":[["a","b"]]}"#;

#[test]
fn list_names_suites_and_examples() {
    let out = sepsys(&["list"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for name in ["extension-lemma", "iterated-minus", "trivialproj", "small-is-trivial"] {
        assert!(text.contains(name), "{name} missing from:\n{text}");
    }
}

#[test]
fn validate_and_analyze_a_system() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.json", TWO_EDGE_PATH);
    assert_eq!(code(&sepsys(&["validate", &f])), 0);
    let out = sepsys(&["--json", "orients", &f]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v.to_string().contains("a*"));
    assert_eq!(code(&sepsys(&["stars", &f])), 0);
    assert_eq!(code(&sepsys(&["analyze", &f])), 0);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cyclic = write(
        dir.path(),
        "cyclic.json",
        r#"{"elements":["a","a*","b","b*"],"inverse":[["a","a*"],["b","b*"]],"leq":[["a","b"],["b","a"]]}"#,
    );
    assert_eq!(code(&sepsys(&["validate", &cyclic])), 2);
    let junk = write(dir.path(), "junk.json", "not json");
    assert_eq!(code(&sepsys(&["validate", &junk])), 2);
    assert_eq!(code(&sepsys(&["validate", "/nonexistent/file.json"])), 2);
    assert_eq!(code(&sepsys(&["check", "no-such-suite"])), 2);
    assert_eq!(code(&sepsys(&["check", "extension-lemma", "--size", "99"])), 2);
    assert_eq!(code(&sepsys(&["frobnicate"])), 2);
}

#[test]
fn generated_example_round_trips_through_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = sepsys(&["gen", "trivialproj", "--depth", "4"]);
    assert_eq!(code(&out), 0);
    let f = write(dir.path(), "tp.json", &stdout(&out));
    assert_eq!(code(&sepsys(&["validate", &f])), 0);
    assert_eq!(code(&sepsys(&["limit", &f])), 0);
    for suite in ["nested-lift", "small-lift", "greatest-dichotomy"] {
        assert_eq!(code(&sepsys(&["check", suite, "--input", &f])), 0, "{suite}");
    }
    // Suites without an input mode refuse a file.
    assert_eq!(code(&sepsys(&["check", "tree-bijection", "--input", &f])), 2);
}

#[test]
fn certificates_pass() {
    for (name, depth) in [("trivialproj", "6"), ("splittingnotclosed", "5"), ("splittingnotclosed2", "5"), ("ray", "5")] {
        let out = sepsys(&["gen", name, "--depth", depth, "--certify"]);
        assert_eq!(code(&out), 0, "{name}: {}", stdout(&out));
    }
}

#[test]
fn suite_exit_codes_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = sepsys(&["check", "extension-lemma", "--count", "100", "--size", "5", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["instances"], 100);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);

    let out = sepsys(&["check", "iterated-minus", "--seed", "7", "--count", "1"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("violation"));
}

#[test]
fn seed_can_come_from_the_environment() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_sepsys"))
            .args(["--json", "check", "iterated-minus", "--count", "1"])
            .env("SEPSYS_SEED", seed)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("7")), 1);
    assert_eq!(code(&run("11")), 0);
}

#[test]
fn search_refutes_and_shrinks() {
    let out = sepsys(&["--json", "search", "--property", "small-is-trivial", "--count", "300"]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["counterexample"]["shrunk"]["inverse"].as_array().unwrap().len() <= 2);
    let out = sepsys(&["search", "--property", "inverse-reverses-order", "--count", "100"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn graph_separations() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "path.txt", "a: b\nb: c\nc:\n");
    let out = sepsys(&["graph", &g, "--order-bound", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!stdout(&out).is_empty());
}
