use std::path::{Path, PathBuf};

use ipkit::cli::run_with;
use serde_json::Value;

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name)
        .display()
        .to_string()
}

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

impl Outcome {
    fn json(&self) -> Value {
        serde_json::from_str(self.out.lines().last().expect("stdout has a record")).unwrap()
    }
}

fn ipkit(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("ipkit").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn temp(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn sumcheck_accepts_and_reports() {
    let o = ipkit(&["sumcheck", "--oracle", "demo"]);
    assert_eq!(o.code, 0, "{}", o.err);
    let v = o.json();
    assert_eq!(v["verdict"], "accept");
    assert_eq!(v["rounds"], 3);
    assert_eq!(v["field_elements"], 10);
}

#[test]
fn sumcheck_false_claim_rejects() {
    let o = ipkit(&["sumcheck", "--oracle", "demo", "--claim", "7"]);
    assert_eq!(o.code, 1);
    assert_eq!(o.json()["verdict"], "reject");
}

#[test]
fn soundness_experiment_passes() {
    let dir = tempfile::tempdir().unwrap();
    let report = temp(&dir, "report.json");
    let o = ipkit(&[
        "sumcheck",
        "--oracle",
        "product:3",
        "--modulus",
        "101",
        "--strategy",
        "deviate-at-round:2",
        "--trials",
        "4000",
        "--seed",
        "3",
        "--report-out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v, o.json());
    assert_eq!(v["trials"], 4000);
    assert_eq!(v["event"], "accept");
    assert_eq!(v["pass"], true);
    assert!((v["theoretical_bound"].as_f64().unwrap() - 6.0 / 101.0).abs() < 1e-12);
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (temp(&dir, "a.jsonl"), temp(&dir, "b.jsonl"));
    for p in [&a, &b] {
        let o = ipkit(&[
            "gkr",
            "--circuit",
            &corpus("two_layer.json"),
            "--input",
            &corpus("two_layer.input"),
            "--seed",
            "9",
            "--transcript-out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.code, 0, "{}", o.err);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let x = ipkit(&[
        "sumcheck",
        "--oracle",
        "random:4:3:1",
        "--seed",
        "5",
        "--trials",
        "50",
    ]);
    let y = ipkit(&[
        "sumcheck",
        "--oracle",
        "random:4:3:1",
        "--seed",
        "5",
        "--trials",
        "50",
    ]);
    assert_eq!(x.out, y.out);
}

#[test]
fn gkr_accepts_the_fixture_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let t = temp(&dir, "t.jsonl");
    let o = ipkit(&[
        "gkr",
        "--circuit",
        &corpus("two_layer.json"),
        "--input",
        "1,2,3,4",
        "--claim",
        "21",
        "--transcript-out",
        t.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", o.err);
    let r = ipkit(&["replay", t.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.err);

    let bad = ipkit(&[
        "gkr",
        "--circuit",
        &corpus("two_layer.json"),
        "--input",
        "1,2,3,4",
        "--claim",
        "22",
    ]);
    assert_eq!(bad.code, 1);
}

#[test]
fn replay_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let t = temp(&dir, "t.jsonl");
    let o = ipkit(&[
        "sumcheck",
        "--oracle",
        "demo",
        "--transcript-out",
        t.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0);
    let text = std::fs::read_to_string(&t).unwrap();
    std::fs::write(&t, text.replacen("\"claim\":\"6\"", "\"claim\":\"7\"", 1)).unwrap();
    assert_ne!(std::fs::read_to_string(&t).unwrap(), text);
    assert_eq!(ipkit(&["replay", t.to_str().unwrap()]).code, 1);
    std::fs::write(&t, &text[..text.len() / 2]).unwrap();
    assert_eq!(ipkit(&["replay", t.to_str().unwrap()]).code, 2);
}

#[test]
fn countsat_from_files_and_inline() {
    let o = ipkit(&[
        "countsat",
        "--formula",
        &corpus("or.formula"),
        "--claim",
        "3",
    ]);
    assert_eq!(o.code, 0, "{}", o.err);
    let o = ipkit(&["countsat", "--formula", "(a & !a)", "--honest"]);
    assert_eq!(o.code, 0);
    let o = ipkit(&[
        "countsat",
        "--formula",
        &corpus("resolution.formula"),
        "--claim",
        "5",
    ]);
    assert_eq!(o.code, 1);
}

#[test]
fn freivalds_and_equality() {
    let (a, b) = (corpus("a.matrix"), corpus("b.matrix"));
    assert_eq!(
        ipkit(&[
            "freivalds",
            "--input",
            &a,
            "--input",
            &b,
            "--input",
            &corpus("ab.matrix")
        ])
        .code,
        0
    );
    assert_eq!(
        ipkit(&[
            "freivalds",
            "--input",
            &a,
            "--input",
            &b,
            "--input",
            &corpus("ab_wrong.matrix")
        ])
        .code,
        1
    );
    let v1 = corpus("v1.vector");
    assert_eq!(ipkit(&["equality", "--input", &v1, "--input", &v1]).code, 0);
    assert_eq!(
        ipkit(&["equality", "--input", &v1, "--input", &corpus("v2.vector")]).code,
        1
    );
}

#[test]
fn qnr_modes() {
    assert_eq!(
        ipkit(&["qnr", "--modulus", "21", "--factors", "3,7", "--a", "5"]).code,
        0
    );
    let o = ipkit(&[
        "qnr",
        "--modulus",
        "21",
        "--factors",
        "3,7",
        "--a",
        "4",
        "--trials",
        "20000",
        "--seed",
        "1",
    ]);
    assert_eq!(o.code, 0);
    assert_eq!(o.json()["pass"], true);
    assert_eq!(
        ipkit(&["qnr", "--modulus", "21", "--factors", "3,5", "--a", "5"]).code,
        2
    );
}

#[test]
fn generators_feed_the_protocols() {
    let dir = tempfile::tempdir().unwrap();
    let (c, i) = (temp(&dir, "c.json"), temp(&dir, "i.txt"));
    let g = ipkit(&[
        "generate",
        "random-circuit",
        "--depth",
        "3",
        "--width",
        "8",
        "--seed",
        "2",
        "--out",
        c.to_str().unwrap(),
    ]);
    assert_eq!(g.code, 0, "{}", g.err);
    assert_eq!(
        ipkit(&[
            "generate",
            "input",
            "--width",
            "8",
            "--out",
            i.to_str().unwrap()
        ])
        .code,
        0
    );
    let o = ipkit(&[
        "gkr",
        "--circuit",
        c.to_str().unwrap(),
        "--input",
        i.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", o.err);
    let f = ipkit(&[
        "generate", "formula", "--vars", "3", "--size", "9", "--seed", "4",
    ]);
    assert_eq!(f.code, 0);
    let text = f.out.trim().to_string();
    assert_eq!(ipkit(&["countsat", "--formula", &text, "--honest"]).code, 0);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["sumcheck", "--bogus"][..],
        &["sumcheck", "--oracle", "nonsense"],
        &["sumcheck", "--modulus", "100"],
        &["sumcheck", "--strategy", "deviate-at-round:0"],
        &["gkr", "--circuit", "/nonexistent/c.json", "--input", "1"],
        &["countsat", "--formula", "(x &"],
        &["replay", "/nonexistent/t.jsonl"],
        &["frobnicate"],
    ] {
        assert_eq!(ipkit(args).code, 2, "{args:?}");
    }
    assert_eq!(ipkit(&["--help"]).code, 0);
}
