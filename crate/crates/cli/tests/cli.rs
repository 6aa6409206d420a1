use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rnmatrix"))
        .args(args)
        .env_remove("RNMATRIX_ROW_CAP")
        .env_remove("RNMATRIX_NODE_CAP")
        .output()
        .unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rnmatrix"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("rnmatrix-cli-{}-{name}", std::process::id()))
}

#[test]
fn valid_formula() {
    let o = run(&["decide", "--logic", "C1", "--formula", "((p & ~p) & ~(p & ~p)) -> ~~p"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("valid:"));
}

#[test]
fn explosion_fails_with_countermodel() {
    let o = run(&["decide", "-l", "C1", "-p", "p; ~p", "-f", "q", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let j = json(&o);
    assert_eq!(j["verdict"], "not-entailed");
    assert_eq!(j["countermodel"]["p"], "t");
    assert_eq!(j["countermodel"]["q"], "F");
}

#[test]
fn both_methods_agree() {
    let o = run(&["decide", "-l", "C3", "-m", "both", "-f", "p | ~p", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let j = json(&o);
    assert_eq!(j["table"]["verdict"], "valid");
    assert_eq!(j["tableau"]["verdict"], "valid");
    let o = run(&["decide", "-l", "mbccl", "-m", "both", "-f", "~~p -> p"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["decide", "-l", "C2", "-f", "p &"]).status.code(), Some(2));
    assert_eq!(run(&["decide", "-l", "C1", "-f", "@p"]).status.code(), Some(2));
    assert_eq!(run(&["decide", "-l", "D3", "-f", "p"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn caps() {
    let o = run(&["decide", "-l", "C3", "-m", "tableau", "--node-cap", "5", "-f", "(p | q) -> (q | p)"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["table", "-l", "C3", "--row-cap", "2", "-f", "(p | q) -> (q | p)"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn batch_mode() {
    let o = run_stdin(&["decide", "-l", "cila"], "# comment\np | ~p\n\n~~p -> p\n");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("valid")).count(), 2);
    let o = run_stdin(&["decide", "-l", "cila"], "p | ~p\np\n");
    assert_eq!(o.status.code(), Some(1));
    let o = run_stdin(&["decide", "-l", "cila"], "p\np &\n");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tables_json() {
    let o = run(&["tables", "-l", "C2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let j = json(&o);
    assert!(j.is_object());
    assert!(stdout(&run(&["tables", "-l", "cila"])).contains('@'));
}

#[test]
fn axiom_listing_and_instances() {
    let o = run(&["axioms", "-l", "C2"]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("bc_2:")));
    let o = run(&["axioms", "-l", "cila", "--schema", "cf", "--instances", "3", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 3);
    for l in &lines {
        assert_eq!(run(&["decide", "-l", "cila", "-m", "both", "-f", l]).status.code(), Some(0), "{l}");
    }
    assert_eq!(run(&["axioms", "-l", "C1", "--schema", "cf"]).status.code(), Some(2));
}

#[test]
fn emitted_artifacts() {
    let (table, tableau) = (scratch("table.json"), scratch("tableau.json"));
    let o = run(&[
        "decide",
        "-l",
        "C1",
        "-m",
        "both",
        "-f",
        "p -> (~p -> q)",
        "--format",
        "json",
        "--emit-table",
        table.to_str().unwrap(),
        "--emit-tableau",
        tableau.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let t: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&table).unwrap()).unwrap();
    let u: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&tableau).unwrap()).unwrap();
    assert!(t["rows"].is_array());
    assert_eq!(u["root"]["label"], "F");
    run(&["decide", "-l", "C1", "-f", "p -> (~p -> q)", "--emit-table", table.to_str().unwrap()]);
    assert!(std::fs::read_to_string(&table).unwrap().starts_with("p "));
    let _ = std::fs::remove_file(table);
    let _ = std::fs::remove_file(tableau);
}

#[test]
fn tableau_text_tree() {
    let o = run(&["tableau", "-l", "C1", "-f", "p -> (~p -> q)"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("F(p -> ~p -> q)"));
    assert!(out.contains("o open"));
}
