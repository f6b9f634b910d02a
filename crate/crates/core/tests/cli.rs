use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn schreier(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schreier"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn machine(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "machine"];
    full.extend_from_slice(args);
    let out = schreier(&full);
    let json = serde_json::from_slice(&out.stdout).expect("machine output is JSON");
    (code(&out), json)
}

#[test]
fn every_shipped_file_validates_except_the_broken_ones() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    for name in names {
        let expected = match name.as_str() {
            "magma-x-as-monoid.json" | "not-a-section.json" => 2,
            _ => 0,
        };
        let out = schreier(&["validate", &data(&name)]);
        assert_eq!(code(&out), expected, "{name}:\n{}", stdout(&out));
    }
}

#[test]
fn magma_declared_monoid_reports_associativity() {
    let (rc, json) = machine(&["validate", &data("magma-x-as-monoid.json")]);
    assert_eq!(rc, 2);
    assert_eq!(json["exit_code"], 2);
    let checks = json["sections"][0]["checks"].as_array().unwrap();
    assert!(checks
        .iter()
        .any(|c| c["status"] == "fail" && c["name"].as_str().unwrap().contains("associativ")));
}

#[test]
fn malformed_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, r#"{"name": "X", "class": "monoid", "elements": ["0""#).unwrap();
    let unknown = dir.path().join("unknown.json");
    let mut f = std::fs::File::create(&unknown).unwrap();
    writeln!(
        f,
        r#"{{"name": "X", "class": "monoid", "elements": ["0"], "constant": "0", "tables": {{"+": [["0"]]}}, "colour": "red"}}"#
    )
    .unwrap();

    let out = schreier(&["validate", truncated.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("line 1, column"), "{}", stdout(&out));

    let (rc, json) = machine(&["validate", unknown.to_str().unwrap()]);
    assert_eq!(rc, 1);
    assert!(json["error"].as_str().unwrap().contains("colour"));

    assert_eq!(code(&schreier(&["validate", "/no/such/file.json"])), 1);
    assert_eq!(code(&schreier(&["bogus"])), 1);
    assert_eq!(code(&schreier(&["loop", "--algebra", "c2", "--hand", "up"])), 1);
    assert_eq!(code(&schreier(&["--help"])), 0);
}

#[test]
fn classify_reports_the_diagonal_retraction() {
    let (rc, json) = machine(&["classify", "--point", &data("c2-diagonal.json")]);
    assert_eq!(rc, 0);
    let direct = json["sections"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["title"] == "template direct")
        .unwrap();
    let rows = &direct["tables"][0]["rows"];
    let pairs: Vec<(String, String)> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r[0].as_str().unwrap().into(), r[1].as_str().unwrap().into()))
        .collect();
    let expected = [("(0,0)", "(0,0)"), ("(0,1)", "(1,0)"), ("(1,0)", "(1,0)"), ("(1,1)", "(0,0)")];
    assert_eq!(pairs.len(), 4);
    for ((x, q), (ex, eq)) in pairs.iter().zip(expected) {
        assert_eq!((x.as_str(), q.as_str()), (ex, eq));
    }
}

#[test]
fn magma_point_is_not_strong() {
    let out = schreier(&["classify", "--point", &data("magma-point.json")]);
    let text = stdout(&out);
    assert_eq!(code(&out), 0, "{text}");
    assert!(text.contains("strong: no"), "{text}");
    assert!(text.contains("witness: 0 a"), "{text}");
}

#[test]
fn diagnostics_of_special_and_loop() {
    let out = schreier(&["special", "--algebra", &data("heyting-3-chain.json")]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("|D(top,mid)| = 0"));

    let out = schreier(&["special", "--algebra", &data("c2.json"), "--template", &data("left-only.json")]);
    assert_eq!(code(&out), 2);

    let out = schreier(&["special", "--algebra", "mag-counterexample", "--template", &data("conjugation.json")]);
    assert_eq!(code(&out), 1);

    for hand in ["left", "right"] {
        assert_eq!(code(&schreier(&["loop", "--algebra", "s3", "--hand", hand])), 0);
    }
}

#[test]
fn machine_output_is_reproducible() {
    let args = ["--format", "machine", "classify", "--point", "c2-diagonal", "--template", "group-conjugation"];
    let a = schreier(&args);
    let b = schreier(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let human = ["classify", "--point", "c2-diagonal"];
    assert_eq!(schreier(&human).stdout, schreier(&human).stdout);
}

#[test]
fn sweep_does_not_depend_on_jobs() {
    let one = machine(&["--jobs", "1", "sweep", "--class", "unitary-magma", "--catalog-size", "2"]);
    let four = machine(&["--jobs", "4", "sweep", "--class", "unitary-magma", "--catalog-size", "2"]);
    assert_eq!(one.0, 0);
    assert_eq!(one.1["sections"], four.1["sections"]);
    let refused = machine(&["sweep", "--class", "unitary-magma", "--catalog-size", "9"]);
    assert_eq!(refused.0, 1);
}

#[test]
fn words_and_examples() {
    let (rc, json) = machine(&["words", "--max-len", "6"]);
    assert_eq!(rc, 0);
    let rows = json["sections"][0]["tables"][0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);

    let out = schreier(&["examples", "--run-all"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(!stdout(&out).contains("[FAIL]"));
}

#[test]
fn protomodular_counterexample_among_magmas() {
    let out = schreier(&["protomodular", "--algebra", &data("c2-magma.json"), "--catalog-size", "3"]);
    let text = stdout(&out);
    assert_eq!(code(&out), 0, "{text}");
    assert!(text.contains("counterexample"), "{text}");
}
