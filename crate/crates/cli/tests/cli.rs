use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(name)
}

fn spic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spic")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_prints_the_call_graphs() {
    let cell = corpus("cell.spi");
    let o = spic(&["analyze", path(&cell)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for e in ["(Cell, {}, Send)", "(Send, {}, Send)", "(Send, {y1}, O)", "read-once: ok"] {
        assert!(out.contains(e), "{out}");
    }
}

#[test]
fn check_qi_refutes_abc() {
    let abc = corpus("abc.spi");
    let o = spic(&["check-qi", path(&abc)]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("refuted      A^(s, 0) >=2 B^(s, y1)"), "{out}");
    let o = spic(&["check-qi", path(&abc), "--format", "json"]);
    let j = json(&o);
    assert_eq!(j["verdict"], "refuted");
    assert_eq!(j["schema_version"], 1);
}

#[test]
fn check_qi_accepts_cell_and_server() {
    for name in ["cell", "server"] {
        let p = corpus(&format!("{name}.spi"));
        let qi = corpus(&format!("{name}.qi.json"));
        let o = spic(&["check-qi", path(&p), "--qi", path(&qi), "--bound", "4"]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
}

#[test]
fn empty_file_is_a_syntax_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("empty.spi");
    std::fs::write(&f, "").unwrap();
    let o = spic(&["parse", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty program"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(spic(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(spic(&["parse", "/no/such/file.spi"]).status.code(), Some(2));
    let cell = corpus("cell.spi");
    assert_eq!(spic(&["run", path(&cell), "--instants", "0"]).status.code(), Some(2));
    assert_eq!(spic(&["run", path(&cell), "--step-cap", "0"]).status.code(), Some(2));
}

#[test]
fn every_json_output_has_a_schema_version() {
    let server = corpus("server.spi");
    for cmd in ["parse", "typecheck", "analyze", "constraints", "abstract", "monitor"] {
        let o = spic(&[cmd, path(&server), "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}");
        assert_eq!(json(&o)["schema_version"], 1, "{cmd}");
    }
    let o = spic(&["run", path(&server), "--instants", "3", "--format", "json"]);
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l["schema_version"] == 1));
}

#[test]
fn abstract_lists_the_rewrite_rules() {
    let server = corpus("server.spi");
    let j = json(&spic(&["abstract", path(&server), "--format", "json"]));
    let rules = j["rules"].as_array().unwrap();
    assert_eq!(rules.len(), 4);
    assert!(rules.iter().any(|r| r["shape"] == "R1" && r["rhs"] == "emit(s2, f(x))"));
}

#[test]
fn run_reads_an_input_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let env = dir.path().join("env.json");
    std::fs::write(
        &env,
        r#"[[], [{"signal": "s", "value": "req(a, zero)"}, {"signal": "s", "value": "req(b, succ(zero))"}], []]"#,
    )
    .unwrap();
    let server = corpus("server.spi");
    let o = spic(&["run", path(&server), "--instants", "3", "--env", env.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("a#0 = [succ(zero)]"), "{out}");
    assert!(out.contains("b#0 = [succ(succ(zero))]"), "{out}");
}

#[test]
fn reports_are_reproducible() {
    let abc = corpus("abc.spi");
    let a = spic(&["monitor", path(&abc), "--instants", "20", "--seed", "3", "--format", "json"]);
    let b = spic(&["monitor", path(&abc), "--instants", "20", "--seed", "3", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["verdictHint"]["verdict"], "growing-trend");
}

#[test]
fn non_suspending_runs_fail() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("loop.spi");
    std::fs::write(&f, "def A() [reset] = A(); init A();").unwrap();
    let f = f.to_str().unwrap();
    assert_eq!(spic(&["run", f, "--step-cap", "100"]).status.code(), Some(1));
    let o = spic(&["monitor", f, "--step-cap", "100"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("non-suspending"));
}

#[test]
fn dot_output_holds_both_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let abc = corpus("abc.spi");
    let o = spic(&["analyze", path(&abc), "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dot).unwrap();
    assert!(text.contains("digraph cycle") && text.contains("digraph instant"));
    assert!(text.contains("\"A\" -> \"B\" [label=\"{y1}\"]"), "{text}");
}

#[test]
fn rejected_programs_fail_the_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("par.spi");
    std::fs::write(&f, "def A() [reset] = (pause.A() | pause.A()); init A();").unwrap();
    let o = spic(&["analyze", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(spic(&["constraints", f.to_str().unwrap()]).status.code(), Some(1));
}
