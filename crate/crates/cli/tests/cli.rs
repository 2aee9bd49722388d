use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nestfold"))
        .args(args)
        .current_dir(root())
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nestfold-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn check_classifies() {
    let o = run(&["check", "testdata/bush.ndt"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Bush: nested, index \u{2245} Nat"));

    let o = run(&["check", "testdata/list.ndt"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("List: ordinary\n"));

    let o = run(&["check", "testdata/bobdylan.ndt"]);
    assert!(stdout(&o).contains("Bob, Dylan: nested, mutual"));
    assert!(stdout(&o).contains("BobDylanIndex: varA, varB; BobC/1, DylanC/2"));
}

#[test]
fn check_reports_positioned_diagnostics() {
    let o = run(&["check", "testdata/bad-arity.ndt"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.starts_with("testdata/bad-arity.ndt:3:15: error: arity mismatch"),
        "{err}"
    );
}

#[test]
fn io_and_usage_errors_exit_two() {
    assert_eq!(run(&["derive", "missing.ndt"]).status.code(), Some(2));
    assert_eq!(run(&["check", "missing.ndt"]).status.code(), Some(2));
    assert_eq!(
        run(&["test", "testdata/bush.ndt", "--max-size", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["derive", "testdata/bush.ndt", "--backend", "coq"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let o = run(&[
        "eval",
        "testdata/bush.ndt",
        "testdata/bush1.ndv",
        "--algebra",
        "product",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn derive_reports_skipped_bridge() {
    let out = std::env::temp_dir().join(format!("nestfold-cli-derive-{}", std::process::id()));
    let o = run(&["derive", "testdata/list.ndt", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(
        text.contains("List.agda: List, ListIndex, I, nfold, nmap, ind, hfold"),
        "{text}"
    );
    assert!(text.contains("note: skipped PS bridge"));
    assert!(out.join("List.agda").is_file());
}

#[test]
fn derive_name_clash_is_a_domain_failure() {
    let f = scratch("clash.ndt", "data T a where\n  nfold : T a\n");
    let out = f.parent().unwrap().join("clash-out");
    let o = run(&["derive", f.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("clashes with"));
}

#[test]
fn eval_routes_agree() {
    for via in ["nfold", "nfold-prime", "ind"] {
        for (alg, want) in [("sum", "34"), ("length", "4")] {
            let o = run(&[
                "eval",
                "testdata/bush.ndt",
                "testdata/bush1.ndv",
                "--algebra",
                alg,
                "--via",
                via,
            ]);
            assert_eq!(stdout(&o).trim(), want, "{alg} via {via}");
        }
    }
    let o = run(&["eval", "testdata/bush.ndt", "testdata/empty.ndv"]);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn eval_prints_named_results() {
    let f = scratch("two.ndv", "x : Bush Nat = [ 1, [ ] ]\ny : Bush Nat = [ ]\n");
    let o = run(&["eval", "testdata/bush.ndt", f.to_str().unwrap(), "--algebra", "length"]);
    assert_eq!(stdout(&o), "x = 2\ny = 0\n");
}

#[test]
fn eval_type_errors_exit_one() {
    let f = scratch("wrong.ndv", "x : Bush Atom = [ 1 ]\n");
    let o = run(&["eval", "testdata/bush.ndt", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error"), "{}", stderr(&o));
}

#[test]
fn test_prints_counts() {
    let o = run(&["test", "testdata/list.ndt", "--max-size", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(
        text.contains("ok   foldList agreement: 4372 cases over 1093 values"),
        "{text}"
    );

    let o = run(&["test", "testdata/bush.ndt", "--max-size", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ok   nfold = nfold': 296 cases over 74 values"));
}

#[test]
fn output_is_deterministic() {
    let a = run(&["test", "testdata/bobdylan.ndt", "--max-size", "4"]);
    let b = run(&["test", "testdata/bobdylan.ndt", "--max-size", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn counterexample_lines_replay() {
    // `test` prints failures as `counterexample : <type> = <value>`.
    let f = scratch(
        "replay.ndv",
        "counterexample : Bush (Bush Nat) = cons (cons 1 leaf) leaf\n",
    );
    let o = run(&["eval", "testdata/bush.ndt", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "1\n");
}
