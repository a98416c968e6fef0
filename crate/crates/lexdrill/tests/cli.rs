use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn lexdrill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexdrill")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    assert_eq!(lexdrill(&[]).status.code(), Some(1));
    assert_eq!(lexdrill(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(lexdrill(&["stats"]).status.code(), Some(1));
    assert_eq!(lexdrill(&["analyze", "x", "--lang", "klingon"]).status.code(), Some(1));
    let help = lexdrill(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("score-dictation"));
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.tsv");
    let o = lexdrill(&["analyze", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.tsv"));

    let bad = dir.path().join("scores.csv");
    std::fs::write(&bad, "child_id,group,test_index,variable,value\nc1,C,1,x,1.0\n").unwrap();
    let o = lexdrill(&["stats", "--scores", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn analyze_then_generate() {
    let dir = tempfile::tempdir().unwrap();
    let patterns = dir.path().join("patterns.json");
    let annotations = dir.path().join("ann.jsonl");
    let o = lexdrill(&[
        "analyze",
        data("corpus_es.tsv").to_str().unwrap(),
        "--out",
        patterns.to_str().unwrap(),
        "--annotations",
        annotations.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bank: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&patterns).unwrap()).unwrap();
    assert_eq!(bank["language"], "es");
    assert!(!bank["patterns"].as_array().unwrap().is_empty());
    let records = std::fs::read_to_string(&annotations).unwrap();
    for line in records.lines() {
        let r: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(r["type"].is_string() && r["wrong"].is_string());
    }

    let lexicon = data("es_freq.tsv");
    let gen = |seed: &str| {
        let o = lexdrill(&[
            "generate",
            "--patterns",
            patterns.to_str().unwrap(),
            "--lexicon",
            lexicon.to_str().unwrap(),
            "--per-level",
            "12",
            "--seed",
            seed,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    let first = gen("3");
    assert_eq!(first, gen("3"));
    assert_ne!(first, gen("4"));
    let exercises: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(exercises["exercises"].as_array().unwrap().len(), 60);

    let o = lexdrill(&[
        "generate",
        "--patterns",
        patterns.to_str().unwrap(),
        "--lexicon",
        lexicon.to_str().unwrap(),
        "--per-level",
        "100000",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("shortfall"));
}

#[test]
fn scoring_commands() {
    let dir = tempfile::tempdir().unwrap();
    let reference = dir.path().join("ref.txt");
    let hyp = dir.path().join("hyp.txt");
    std::fs::write(&reference, "la casa es muy bonita\n").unwrap();
    std::fs::write(&hyp, "la kasa es mui vonita\n").unwrap();
    let args = |cmd| [cmd, "--ref", reference.to_str().unwrap(), "--hyp", hyp.to_str().unwrap()];

    let o = lexdrill(&args("score-dictation"));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let w: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(w["total_words"], 5);
    assert_eq!(w["words_with_errors"], 3);
    assert_eq!(w["errors_per_wrong_word"], 1.0);

    let o = lexdrill(&args("score-reading"));
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["total_words"], 5);
    assert_eq!(r["errors_per_word"], 0.6);
}

#[test]
fn stats_table_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scores.csv");
    let mut text = String::from("child_id,group,test_index,variable,value\n");
    let values = [[5.0, 3.0, 3.5], [4.0, 4.5, 2.0], [6.0, 4.0, 4.0], [5.0, 5.5, 4.0], [7.0, 5.0, 5.5], [3.0, 3.5, 1.0]];
    for (k, v) in values.iter().enumerate() {
        let group = if k % 2 == 0 { "A" } else { "B" };
        for (t, x) in v.iter().enumerate() {
            text.push_str(&format!("c{k},{group},{},errors,{x}\n", t + 1));
        }
    }
    text.push_str("c9,A,1,errors,4.0\n");
    std::fs::write(&csv, text).unwrap();

    let o = lexdrill(&["stats", "--scores", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = stdout(&o);
    assert!(table.contains("experimental") && table.contains("control"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("excluded c9"));

    let o = lexdrill(&["stats", "--scores", csv.to_str().unwrap(), "--json"]);
    let s: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(s["included_children"], 6);
    assert_eq!(s["variables"][0]["data_points"], 12);
    // experimental changes: -2, -2, -2 (group A) and -2.5, -1.5, -2.5 (group B)
    let change = s["variables"][0]["conditions"][0]["change_mean"].as_f64().unwrap();
    assert!((change - -12.5 / 6.0).abs() < 1e-12);
}
