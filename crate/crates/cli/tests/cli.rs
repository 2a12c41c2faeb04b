//! End-to-end runs of the `codverify` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_codverify")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn table(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "data", "tables", name].iter().collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn cod_of_a5_table() {
    let o = run(&["cod", "--table", &table("A5.tbl")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().collect::<Vec<_>>(), ["1", "2^2*3", "3*5", "2^2*5"]);
}

#[test]
fn cod_of_catalog_group_as_json() {
    let o = run(&["cod", "--group", "Sp4_q(8)", "--json"]);
    assert!(o.status.success());
    let v: Vec<String> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.contains(&"1".to_string()) && v.len() > 5);
}

#[test]
fn solve_reports_roots_and_absence() {
    let o = run(&["solve", "--family", "K2M1", "--target", "3^2*5^2*17"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "none");
    let o = run(&["solve", "--family", "K2M1", "--target", "3*5"]);
    assert_eq!(stdout(&o).trim(), "4");
}

#[test]
fn lemma_json_carries_case_labels() {
    let o = run(&["verify-lemma", "--target", "U4_2", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let cases = v.as_array().unwrap();
    assert!(!cases.is_empty());
    assert!(cases.iter().all(|c| c.get("lemma_case").is_some() && c.get("verdict").is_some()));
}

#[test]
fn theorem_all_targets_verified() {
    let o = run(&["verify-theorem", "--all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("overall Verified").count(), 16);
}

#[test]
fn sp4_samples_are_honoured() {
    let o = run(&["verify-lemma", "--target", "Sp4_q", "--samples", "8,16"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("q=8") && out.contains("q=16") && !out.contains("q=32"));
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(run(&["verify-theorem", "--target", "NotAGroup"]).status.code(), Some(2));
    assert_eq!(run(&["verify-lemma", "--target", "Sp4_q", "--samples", "6"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--family", "K2M1", "--target", "13*7"]).status.code(), Some(2));
}
