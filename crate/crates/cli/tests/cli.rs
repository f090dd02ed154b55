use std::path::Path;
use std::process::Command;

use serde_json::Value;
use sha2::{Digest, Sha256};

fn semiflow(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_semiflow")).args(args).output().expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn analyze_full_shift_is_devaney() {
    let d = tempfile::tempdir().unwrap();
    let sys = write(d.path(), "f2.json", r#"{"kind":"sft","vertices":2,"edges":[[0,0],[0,1],[1,0],[1,1]]}"#);
    let rep = d.path().join("r.json");
    let (code, _) = semiflow(&["analyze", "--system", &sys, "--report", rep.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r = read_json(&rep);
    assert_eq!(r["verdicts"]["devaney_chaotic"]["value"], true);
    assert_eq!(r["verdicts"]["main_theorem"]["verdict"], "consistent");
    assert_eq!(r["tool"]["name"], "semiflow");
    assert!(r["budgets"]["horizon"].is_u64());
    // the digest is of the input file bytes
    let digest = hex::encode(Sha256::digest(std::fs::read(&sys).unwrap()));
    assert_eq!(r["input"]["sha256"], digest.as_str());
}

#[test]
fn analyze_cycle_takes_ueq_branch() {
    let d = tempfile::tempdir().unwrap();
    let sys = write(d.path(), "c3.json", r#"{"kind":"finite","n":3,"metric":"discrete","generators":[[1,2,0]]}"#);
    let rep = d.path().join("r.json");
    let (code, _) = semiflow(&["analyze", "--system", &sys, "--report", rep.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(read_json(&rep)["verdicts"]["dichotomy_branch"], "ueq");
}

#[test]
fn malformed_input_exits_2() {
    let d = tempfile::tempdir().unwrap();
    let sys = write(d.path(), "bad.json", r#"{"vertices":2,"edges":[]}"#);
    let rep = d.path().join("r.json");
    assert_eq!(semiflow(&["analyze", "--system", &sys, "--report", rep.to_str().unwrap()]).0, 2);
    assert!(!rep.exists());
    assert_eq!(semiflow(&["witness", "--system", &sys, "--property", "XX"]).0, 2);
    assert_eq!(semiflow(&["theorem-check", "--corpus", d.path().join("missing").to_str().unwrap(), "--report", "x.json"]).0, 2);
}

#[test]
fn witness_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let dbl = write(d.path(), "d.json", r#"{"kind":"map1d","family":"doubling"}"#);
    let rot = write(d.path(), "r.json", r#"{"kind":"map1d","family":"rotation","params":[0.6180339887498949]}"#);
    let log = write(d.path(), "l.json", r#"{"kind":"map1d","family":"logistic","params":[4.0]}"#);
    let (code, out) = semiflow(&["witness", "--system", &dbl, "--property", "S", "--constant", "0.25"]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["verdict"]["status"], "holds");
    assert_eq!(doc["revalidated"], true);
    assert_eq!(semiflow(&["witness", "--system", &rot, "--property", "S", "--constant", "0.25"]).0, 1);
    assert_eq!(semiflow(&["witness", "--system", &log, "--property", "S", "--constant", "0.4", "--horizon", "1"]).0, 3);
    assert_eq!(semiflow(&["witness", "--system", &dbl, "--property", "S", "--constant", "-1"]).0, 2);
    assert_eq!(semiflow(&["witness", "--system", &dbl, "--property", "ES"]).0, 2);
}

#[test]
fn witness_subshift_properties() {
    let d = tempfile::tempdir().unwrap();
    let f2 = write(d.path(), "f2.json", r#"{"kind":"sft","vertices":2,"edges":[[0,0],[0,1],[1,0],[1,1]]}"#);
    let c3 = write(d.path(), "c3.json", r#"{"kind":"sft","vertices":3,"edges":[[0,1],[1,2],[2,0]]}"#);
    assert_eq!(semiflow(&["witness", "--system", &f2, "--property", "GMS"]).0, 0);
    assert_eq!(semiflow(&["witness", "--system", &f2, "--property", "ES", "--constant", "0.25"]).0, 0);
    assert_eq!(semiflow(&["witness", "--system", &c3, "--property", "EQ", "--constant", "0.25"]).0, 0);
    assert_eq!(semiflow(&["witness", "--system", &f2, "--property", "EQ", "--constant", "0.25"]).0, 1);
}

#[test]
fn corpus_is_reproducible_and_checkable() {
    let d = tempfile::tempdir().unwrap();
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    for out in [&a, &b] {
        let args = ["corpus", "--generator", "random-sft", "--count", "100", "--corpus-seed", "7", "--out", out.to_str().unwrap()];
        assert_eq!(semiflow(&args).0, 0);
    }
    let names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 101);
    for n in &names {
        assert_eq!(std::fs::read(a.join(n)).unwrap(), std::fs::read(b.join(n)).unwrap());
    }
    let rep = d.path().join("t.json");
    let (code, _) = semiflow(&["theorem-check", "--corpus", a.to_str().unwrap(), "--report", rep.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(code, 0);
    let r = read_json(&rep);
    assert_eq!(r["summary"]["systems"], 100);
    assert_eq!(r["summary"]["main_theorem"]["counterexample"], 0);
    let first = &r["systems"][0];
    let on_disk = std::fs::read(a.join(format!("{}.json", first["id"].as_str().unwrap()))).unwrap();
    assert_eq!(first["sha256"], hex::encode(Sha256::digest(on_disk)).as_str());
}

#[test]
fn corpus_generator_errors() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("e2");
    assert_eq!(semiflow(&["corpus", "--generator", "exhaustive-sft", "--vertices", "2", "--out", out.to_str().unwrap()]).0, 0);
    assert_eq!(std::fs::read_dir(&out).unwrap().count(), 14);
    let z = d.path().join("z");
    assert_eq!(semiflow(&["corpus", "--generator", "random-sft", "--edge-probs", "0", "--out", z.to_str().unwrap()]).0, 2);
    assert_eq!(semiflow(&["corpus", "--generator", "exhaustive-sft", "--vertices", "4", "--out", z.to_str().unwrap()]).0, 2);
}

#[test]
fn theorem_check_generated_corpora() {
    let d = tempfile::tempdir().unwrap();
    let rep = d.path().join("t.json");
    let (code, _) = semiflow(&["theorem-check", "--generator", "exhaustive-sft", "--vertices", "3", "--report", rep.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r = read_json(&rep);
    assert_eq!(r["summary"]["systems"], 487);
    assert_eq!(r["summary"]["orbit_checks"], r["summary"]["orbit_checks_passed"]);
    let (code, _) = semiflow(&["theorem-check", "--generator", "catalog", "--report", rep.to_str().unwrap()]);
    assert_eq!(code, 0);
}
