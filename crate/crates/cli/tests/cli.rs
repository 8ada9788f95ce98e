use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const TWO_STATE: &str = "states 2\n0 1 1.0\nlabels\n0: up\n1: repair\n";
const REQ: &str = r#"P<=0.2 [ "up" U<=5 "repair" ]"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smc-repair")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn check_exit_codes() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.txt", TWO_STATE);
    let sat = run(&["check", p(&model), "P>=0.5 [ up U<=5 repair ]"]);
    assert_eq!(sat.status.code(), Some(0), "{}", stderr(&sat));
    assert!(stdout(&sat).contains("0.99326"));
    assert_eq!(run(&["check", p(&model), REQ]).status.code(), Some(1));

    let bad = write(&dir, "bad.txt", "states 2\n0 1 1.0\n0 x 2\n");
    let out = run(&["check", p(&bad), REQ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    assert_eq!(run(&["check", p(&model), "P<=2 [ up U<=5 repair ]"]).status.code(), Some(2));
    assert_eq!(run(&["check", "/nonexistent/model", REQ]).status.code(), Some(2));
    assert_eq!(run(&["check", p(&model)]).status.code(), Some(2));
}

#[test]
fn repair_reports_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.txt", TWO_STATE);
    let out = run(&["repair", p(&model), REQ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("Repaired") && text.contains("|T_i| = 1") && text.contains("|T_k| = 0"), "{text}");

    let out = run(&["repair", p(&model), "P<=0.999 [ up U<=5 repair ]"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("No need for rate reduction"));

    let race = write(&dir, "race.txt", "states 3\n0 1 1\n0 2 1\nlabels\n0: up\n1: repair\n");
    let out = run(&["repair", p(&race), "P>=0.995 [ up U<=5 repair ]"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("reaches at most 0.99"), "{}", stdout(&out));
}

#[test]
fn repair_json_schema() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.txt", TWO_STATE);
    let out = run(&["repair", "--json", p(&model), REQ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "Repaired");
    assert_eq!(v["transitions"]["i"], serde_json::json!([[0, 1]]));
    let i = v["factors"]["i"].as_f64().unwrap();
    let threshold = -(0.8f64).ln() / 5.0;
    assert!(i <= threshold && i >= threshold - 1e-4);
    assert!(v["after"]["0"].as_f64().unwrap() <= 0.2);
    assert_eq!(v["before"]["1"], 1.0);
}

#[test]
fn formula_file_and_atom_flags() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.txt", TWO_STATE);
    let formula = write(&dir, "f.txt", &format!("{REQ}\n"));
    assert_eq!(run(&["check", p(&model), "--formula-file", p(&formula)]).status.code(), Some(1));
    let two = write(&dir, "g.txt", "P<=0.2 [ up U<=5 repair ]\nP<=0.3 [ up U<=5 repair ]\n");
    assert_eq!(run(&["check", p(&model), "--formula-file", p(&two)]).status.code(), Some(2));

    let unknown = "P<=0.2 [ up U<=5 broken ]";
    let out = run(&["check", p(&model), unknown]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("warning") && stderr(&out).contains("broken"));
    assert_eq!(run(&["check", "--strict-atoms", p(&model), unknown]).status.code(), Some(2));
}

#[test]
fn duplicates_need_opt_in() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "d.txt", "states 2\n0 1 0.5\n0 1 0.5\nlabels\n0: up\n1: repair\n");
    assert_eq!(run(&["check", p(&model), REQ]).status.code(), Some(2));
    let out = run(&["check", "--merge-duplicates", p(&model), REQ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("0.99326"));
}

#[test]
fn sweep_rows_and_identity_endpoint() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.txt", TWO_STATE);
    let out = run(&["sweep", "--factor", "i", "--start", "0.5", "--stop", "1", "--steps", "2", p(&model), REQ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["factor,state,probability", "0.5,0,0.917915001", "1,0,0.993262053"]);

    let out = run(&["sweep", "--factor", "k", "--points", "0.25,1", p(&model), REQ]);
    assert_eq!(stdout(&out).lines().count(), 1, "no gobothways states to track");
    assert_eq!(run(&["sweep", "--factor", "i", "--steps", "1", p(&model), REQ]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--factor", "q", p(&model), REQ]).status.code(), Some(2));
}

#[test]
fn partition_listing() {
    let dir = TempDir::new().unwrap();
    let machine = write(
        &dir,
        "machine.txt",
        "states 6\n0 1 0.5\n1 0 0.2\n2 0 1\n2 3 0.7\n2 5 0.3\n3 2 0.4\n3 4 1\n3 5 0.6\n4 5 2\n5 2 3\n5 5 1\n\
         labels\n2: up\n3: up\n4: up\n5: repair\n",
    );
    let out = run(&["partition", p(&machine), "P<=0.3 [ up U<=2 repair ]"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("gotoinvalid") && l.ends_with("(empty)")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("gobothways") && l.ends_with("2 3")), "{text}");

    let out = run(&["partition", "--json", p(&machine), "P<=0.3 [ up U<=2 (up | repair) ]"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["counts"]["target"], 4);
}

#[test]
fn simulate_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.txt", TWO_STATE);
    let args = ["simulate", "--paths", "5000", "--seed", "3", p(&model), REQ];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, run(&args).stdout);
}
