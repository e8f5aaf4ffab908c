mod common;

use std::process::Command;

use common::*;

fn s(f: &str) -> String {
    samples_dir().join(f).display().to_string()
}

fn args(list: &[&str]) -> Vec<String> {
    list.iter().map(|a| a.to_string()).collect()
}

#[test]
fn exit_codes_of_the_sample_commands() {
    let dir = tempfile::tempdir().unwrap();
    let expected = [0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0];
    let cases = cli_cases(dir.path());
    assert_eq!(cases.len(), expected.len());
    for (a, want) in cases.iter().zip(expected) {
        let (code, _, err) = run_cli(a);
        assert_eq!(code, want, "`{}`: {err}", a.join(" "));
    }
}

#[test]
fn prove_prints_verdict_and_trace() {
    let (code, out, _) = run_cli(&args(&["prove", &s("empdept.cql"), "--schema", "S", "admin.works.admin.works = id:Dept"]));
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "Proven");
    assert_eq!(lines.len(), 4, "{out}");
    assert!(lines[3].starts_with("  = id:Dept"), "{out}");
}

#[test]
fn migrate_writes_an_instance_that_loads() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().join("pi.cql");
    let (code, _, err) = run_cli(&args(&[
        "migrate", &s("product.cql"), "--kind", "pi", "--mapping", "Collapse", "--instance", "Small", "-o",
        o.to_str().unwrap(), "--name", "P",
    ]));
    assert_eq!(code, 0, "{err}");
    let (code, out, err) = run_cli(&args(&["validate", o.to_str().unwrap(), "--include", &s("product.cql")]));
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("instance P on Single: 6 elements"), "{out}");
}

#[test]
fn usage_errors_exit_two() {
    for a in [
        args(&["check", &s("empdept.cql"), "--instance", "Nope"]),
        args(&["migrate", &s("loops.cql"), "--kind", "delta", "--mapping", "Keep", "--instance", "Fixed", "-o", "/dev/null", "--provenance", "/dev/null"]),
        args(&["bogus"]),
        args(&["validate", &s("empdept.cql"), "--max-path-len", "0"]),
    ] {
        let (code, _, err) = run_cli(&a);
        assert_eq!(code, 2, "`{}`: {err}", a.join(" "));
        assert!(!err.is_empty());
    }
}

#[test]
fn load_errors_are_positioned() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cql");
    std::fs::write(&bad, "schema S { entities: A; edges: f: A -> B; }\ninstance I on T { }\n").unwrap();
    let (code, _, err) = run_cli(&args(&["validate", bad.to_str().unwrap()]));
    assert_eq!(code, 1);
    assert!(err.contains("bad.cql:1:1:"), "{err}");
    assert!(err.contains("undeclared node `B`"), "{err}");
}

#[test]
fn import_round_trips_exported_tables() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("tables");
    let (code, _, _) = run_cli(&args(&["export-csv", &s("empdept.cql"), "--instance", "Corrected", "--dir", csv.to_str().unwrap()]));
    assert_eq!(code, 0);
    let (code, out, _) = run_cli(&args(&["import-csv", &s("empdept.cql"), "--schema", "S", "--dir", csv.to_str().unwrap(), "--name", "Corrected"]));
    assert_eq!(code, 0);
    let (_, fmt, _) = run_cli(&args(&["fmt", &s("empdept.cql")]));
    let block = |text: &str| -> String {
        let start = text.find("instance Corrected").unwrap();
        let end = text[start..].find("\n}\n").unwrap();
        text[start..start + end].to_owned()
    };
    assert_eq!(block(&out), block(&fmt));
}

#[test]
fn binary_matches_in_process_runs() {
    let a = args(&["check", &s("empdept.cql"), "--instance", "PaperVerbatim"]);
    let output = Command::new(env!("CARGO_BIN_EXE_catmig")).args(&a).output().unwrap();
    let (code, out, _) = run_cli(&a);
    assert_eq!(output.status.code(), Some(code));
    assert_eq!(String::from_utf8(output.stdout).unwrap(), out);
}
