//! End-to-end tests of the command-line interface: exit codes, output
//! determinism, corpus overrides, and the negative controls.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_delpezzo"))
}

fn repo_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn suite_passes_with_embedded_corpus() {
    let out = run(&["suite"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("0 failed"));
}

#[test]
fn suite_passes_with_repo_corpus_dir() {
    let corpus = repo_corpus();
    let out = run(&["--corpus", corpus.to_str().unwrap(), "suite"]);
    assert!(out.status.success(), "{}", stdout(&out));
}

#[test]
fn suite_json_is_byte_deterministic() {
    let a = run(&["--format", "json", "suite"]);
    let b = run(&["--format", "json", "suite"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let parsed: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(parsed["checks"].as_array().unwrap().len() >= 33);
}

#[test]
fn analyze_fixture_and_vmrt() {
    let out = run(&["analyze", "E6"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("degree 3"));
    assert!(text.contains("type E6"));
    assert!(text.contains("lines (1)"));

    let out = run(&["analyze", "4A1", "--vmrt", "conic:1,2,4,5"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("vmrt (strict): zeta + Pi*(H - E1 - E2 - E4 - E5)"));

    let out = run(&["--format", "json", "analyze", "4A1"]);
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["line_count"], 9);
    assert_eq!(parsed["dynkin"], "4A1");
}

#[test]
fn malformed_json_exits_2() {
    let dir = std::env::temp_dir().join("delpezzo-cli-bad");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["analyze", "no_such_fixture"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_verify_accepts_corpus_certificates() {
    let cert = repo_corpus().join("certs/big_2A1_9.json");
    let out = run(&["certify", "verify", "2A1_9", cert.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("accepted"));
}

#[test]
fn corrupted_e6_residual_fails_suite_naming_the_certificate() {
    // Copy the corpus and corrupt the residual of the E6 certificate.
    let dir = std::env::temp_dir().join("delpezzo-corrupt-corpus");
    let _ = std::fs::remove_dir_all(&dir);
    for sub in ["configs", "certs"] {
        std::fs::create_dir_all(dir.join(sub)).unwrap();
        for entry in std::fs::read_dir(repo_corpus().join(sub)).unwrap() {
            let entry = entry.unwrap();
            std::fs::copy(entry.path(), dir.join(sub).join(entry.file_name())).unwrap();
        }
    }
    let cert_path = dir.join("certs/orbifold_E6.json");
    let text = std::fs::read_to_string(&cert_path).unwrap();
    let corrupted = text.replace(
        "\"residual\": [0, 0, 0, 0, 0, 0, 0]",
        "\"residual\": [0, 1, 0, 0, 0, 0, 0]",
    );
    assert_ne!(text, corrupted, "corruption must apply");
    std::fs::write(&cert_path, corrupted).unwrap();

    let out = run(&["--corpus", dir.to_str().unwrap(), "suite"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    // The corrupt certificate fails its own check and poisons the degree-3
    // classification seeds; every failure names the certificate.
    let failing: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert!(!failing.is_empty(), "{text}");
    assert!(failing.iter().all(|l| l.contains("orbifold_E6")), "{text}");
}

#[test]
fn search_writes_verifiable_certificates() {
    let dir = std::env::temp_dir().join("delpezzo-search-out");
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("found.json");
    let out = run(&[
        "certify",
        "search",
        "A3_4",
        "--mode",
        "nonbig",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    let out = run(&["certify", "verify", "A3_4", out_path.to_str().unwrap()]);
    assert!(out.status.success());

    // No bigness certificate exists for A3_4.
    let out = run(&["certify", "search", "A3_4", "--mode", "big"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("none"));
}

#[test]
fn elliptic_subcommands() {
    let out = run(&["elliptic", "enum", "--euler", "12", "--min-nonreduced", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("I0* + I0*"));
    assert!(text.contains("1 assignments"));

    let out = run(&["elliptic", "identity", "--fibers", "I0*,I0*"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("2 Y = 2 zeta"));

    let out = run(&[
        "elliptic",
        "identity",
        "--fibers",
        "I1*,I4,I1",
        "--halphen",
        "2",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("1 Y = 1 zeta"));

    let out = run(&["elliptic", "identity", "--fibers", "I0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn orbifold_and_hierarchy() {
    let out = run(&["orbifold", "E6"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("23/24"));

    for degree in ["4", "3"] {
        let out = run(&["hierarchy", "report", "--degree", degree]);
        assert!(out.status.success(), "degree {degree}: {}", stdout(&out));
        assert!(stdout(&out).contains("matches the published"));
    }
}

#[test]
fn hierarchy_dag_dump() {
    let out = run(&["hierarchy", "dag", "degree3"]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["nodes"].as_array().unwrap().len(), 21);
    assert_eq!(parsed["spec_edges"].as_array().unwrap().len(), 42);

    let out = run(&["hierarchy", "dag", "degree9"]);
    assert_eq!(out.status.code(), Some(2));
}
