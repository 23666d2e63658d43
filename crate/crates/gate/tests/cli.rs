mod common;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

use serde_json::Value;
use tempfile::tempdir;

use common::{resources, SARAH};

struct Out {
    code: i32,
    stdout: Vec<u8>,
    stderr: String,
}

impl Out {
    fn text(&self) -> String {
        String::from_utf8(self.stdout.clone()).unwrap()
    }

    fn json(&self) -> Value {
        serde_json::from_slice(&self.stdout).unwrap()
    }
}

/// Runs the command in-process against `<dir>/root`.
fn gate(dir: &Path, args: &[&str]) -> Out {
    let root = dir.join("root");
    let res = resources(dir);
    let mut argv = vec![
        "gate".to_string(),
        "--root".into(),
        root.to_string_lossy().into_owned(),
        "--resources".into(),
        res.to_string_lossy().into_owned(),
    ];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
    let code = gate::cli::run(argv, &mut stdout, &mut stderr);
    Out {
        code,
        stdout,
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn ok(dir: &Path, args: &[&str]) -> Out {
    let out = gate(dir, args);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    out
}

fn sarah(dir: &Path) {
    let file = dir.join("sarah.txt");
    fs::write(&file, SARAH).unwrap();
    ok(dir, &["collection", "create", "c"]);
    ok(dir, &["doc", "add", "-c", "c", "sarah", file.to_str().unwrap()]);
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gate"))
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("Usage"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["collection", "import-sgml", "run-chain", "run-collection", "score", "serve"] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
}

#[test]
fn binary_honours_gate_root_and_reads_stdin() {
    let dir = tempdir().unwrap();
    let root = dir.path().join("root");
    let out = bin().env("GATE_ROOT", &root).args(["collection", "create", "c"]).output().unwrap();
    assert!(out.status.success());
    let mut child = bin()
        .env("GATE_ROOT", &root)
        .args(["doc", "add", "sarah", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(SARAH).unwrap();
    assert!(child.wait().unwrap().success());
    let out = bin()
        .env("GATE_ROOT", &root)
        .args(["run", "--collection", "c", "--doc", "sarah", "tokenizer-0.1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("5 annotations added"));
    let out = bin()
        .env("GATE_ROOT", &root)
        .args(["run", "--doc", "nobody", "tokenizer-0.1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("NO_SUCH_DOC"));
}

#[test]
fn run_prints_run_result() {
    let dir = tempdir().unwrap();
    sarah(dir.path());
    let out = ok(dir.path(), &["--json", "run", "--collection", "c", "--doc", "sarah", "tokenizer-0.1"]);
    let r = out.json();
    assert_eq!(r["module"], "tokenizer-0.1");
    assert_eq!(r["annotations_added"], 5);
    let amber = gate(dir.path(), &["--json", "run", "-c", "c", "-d", "sarah", "parser-1"]);
    assert_eq!(amber.code, 1);
    assert_eq!(amber.json()["code"], "NO_SUCH_MODULE");
}

#[test]
fn score_against_key_file() {
    let dir = tempdir().unwrap();
    sarah(dir.path());
    ok(dir.path(), &["run", "-d", "sarah", "tokenizer-0.1"]);
    let gold = dir.path().join("gold.ann");
    fs::write(&gold, "1\ttoken\tgold-1\t0:5\t\n2\tname\tgold-1\t0:5\tname_type=person\n").unwrap();
    let out = ok(
        dir.path(),
        &["score", "--doc", "sarah", "--response", "producer=tokenizer-*", "--key-file", gold.to_str().unwrap()],
    );
    let text = out.text();
    assert!(text.contains("precision 1/5 (0.2000)"), "{text}");
    assert!(text.contains("recall 1/2 (0.5000)"), "{text}");
    assert!(text.contains("f1 2/7"), "{text}");

    let out = ok(
        dir.path(),
        &["--json", "score", "-d", "sarah", "--response", "type=token;span=0:5", "--key", "type=token"],
    );
    assert_eq!(out.json()["exact"]["f1"], "1/3");
    let bad = gate(dir.path(), &["score", "-d", "sarah", "--response", "colour=red", "--key", ""]);
    assert_eq!(bad.code, 1);
}

#[test]
fn annotation_subcommands() {
    let dir = tempdir().unwrap();
    sarah(dir.path());
    let added = ok(
        dir.path(),
        &["ann", "add", "-d", "sarah", "--type", "name", "--span", "0:5", "--attr", "name_type=person"],
    );
    assert_eq!(added.text(), "1\tname\tmanual-1.0\t0:5\tname_type=person\n");
    let multi = ok(
        dir.path(),
        &["--json", "ann", "add", "-d", "sarah", "--type", "np", "--span", "0:5", "--span", "6:13", "--producer", "me-2"],
    );
    assert_eq!(multi.json()["spans"], serde_json::json!([[0, 5], [6, 13]]));
    let listed = ok(dir.path(), &["ann", "list", "-d", "sarah", "--span", "6:7"]);
    assert_eq!(listed.text(), "2\tnp\tme-2\t0:5,6:13\t\n");
    let deleted = ok(dir.path(), &["ann", "delete", "-d", "sarah", "--producer", "manual-*"]);
    assert_eq!(deleted.text(), "deleted 1\n");
    let bad = gate(dir.path(), &["ann", "add", "-d", "sarah", "--type", "x", "--span", "5:99"]);
    assert_eq!(bad.code, 1);
    assert!(bad.stderr.contains("SPAN_OUT_OF_BOUNDS"));
    let usage = gate(dir.path(), &["ann", "add", "-d", "sarah", "--type", "x", "--span", "five"]);
    assert_eq!(usage.code, 2);
}

#[test]
fn documents_text_and_sgml() {
    let dir = tempdir().unwrap();
    sarah(dir.path());
    let sgml = dir.path().join("n.sgml");
    fs::write(&sgml, "<DOC><S>Sarah <NAME>savored</NAME> soup.</S></DOC>").unwrap();
    ok(dir.path(), &["import-sgml", "-c", "c", "n", sgml.to_str().unwrap()]);
    assert_eq!(ok(dir.path(), &["doc", "list", "-c", "c"]).text(), "sarah\nn\n");
    assert_eq!(ok(dir.path(), &["doc", "text", "-d", "n"]).stdout, b"Sarah savored soup.");
    assert_eq!(ok(dir.path(), &["doc", "text", "-d", "sarah", "--start", "6", "--end", "13"]).stdout, b"savored");
    assert_eq!(
        ok(dir.path(), &["export-sgml", "-d", "n"]).stdout,
        b"<DOC><S>Sarah <NAME>savored</NAME> soup.</S></DOC>"
    );
    assert_eq!(ok(dir.path(), &["export-sgml", "-d", "n", "--type", "name"]).stdout, b"Sarah <NAME>savored</NAME> soup.");
    let bad = dir.path().join("bad.sgml");
    fs::write(&bad, "<A>x").unwrap();
    let out = gate(dir.path(), &["doc", "add", "--sgml", "-c", "c", "bad", bad.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("MALFORMED_SGML"), "{}", out.stderr);
}

#[test]
fn modules_states_chains_and_batches() {
    let dir = tempdir().unwrap();
    sarah(dir.path());
    let modules = ok(dir.path(), &["modules"]).text();
    assert!(modules.starts_with("tokenizer-0.1\ttight\tpre []\tresults [tokens]\n"), "{modules}");
    let states = ok(dir.path(), &["states", "-d", "sarah"]).text();
    assert!(states.contains("tokenizer-0.1\tgreen\n"));
    assert!(states.contains("sentencer-0.1\tamber\tneeds \"tokenizer-* tokens\" from [tokenizer-0.1]\n"));
    assert!(states.contains("edge tokenizer-0.1 -> tagger-0.1\n"));

    let chain = ok(
        dir.path(),
        &["--json", "run-chain", "-d", "sarah", "--start", "tokenizer-0.1", "tokenizer-0.1", "tagger-0.1", "sentencer-0.1"],
    );
    assert_eq!(chain.json().as_array().unwrap().len(), 3);

    let file = dir.path().join("o.txt");
    fs::write(&file, "Another one.").unwrap();
    ok(dir.path(), &["doc", "add", "o", file.to_str().unwrap()]);
    let batch = ok(dir.path(), &["run-collection", "gazetteer-0.1"]).text();
    assert!(batch.contains("gazetteer-0.1 on sarah: 1 annotations added"), "{batch}");
    assert!(batch.contains("o: PRECONDITION_UNSATISFIED"), "{batch}");
}

#[test]
fn collection_must_be_named_when_ambiguous() {
    let dir = tempdir().unwrap();
    ok(dir.path(), &["collection", "create", "a"]);
    ok(dir.path(), &["collection", "create", "b"]);
    assert_eq!(ok(dir.path(), &["collection", "list"]).text(), "a\nb\n");
    let out = gate(dir.path(), &["doc", "list"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("--collection"));
}
