mod common;

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(common::bin())
        .args(args)
        .output()
        .expect("spawn lagwalls")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn walls_tsv_genus_8() {
    let o = run(&["walls", "--genus", "8", "--div", "2", "--format", "tsv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 4, "{text}");
    assert!(lines.iter().all(|l| l.split('\t').count() == 8));
}

#[test]
fn inadmissible_genus_exits_2() {
    let o = run(&["walls", "--genus", "6", "--div", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("divisibility 2 requires 4 | g"), "{err}");
    assert_eq!(run(&["classes", "--genus", "1"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["walls"]).status.code(), Some(2));
    assert_eq!(
        run(&["walls", "--genus", "4", "--div", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["walls", "--genus", "4", "--div", "2", "--format", "dot"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["ledger", "--genus", "5", "--div", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["verify", "--mutate", "nope"]).status.code(), Some(2));
}

#[test]
fn dot_dashed_edges() {
    for (g, div, dashed) in [("4", "2", 2), ("8", "2", 3), ("7", "1", 0)] {
        let o = run(&["chain", "--genus", g, "--div", div, "--format", "dot"]);
        assert_eq!(o.status.code(), Some(0));
        let dot = stdout(&o);
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("style=dashed").count(), dashed, "g={g}");
        assert_eq!(dot.matches("label=\"pi\"").count(), 1);
        assert_eq!(dot.matches("label=\"phi\"").count(), 1);
    }
}

#[test]
fn dot_is_byte_stable() {
    let args = ["chain", "--genus", "24", "--div", "2", "--format", "dot"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn json_output_fields() {
    let o = run(&["walls", "--genus", "12", "--div", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["genus"], 12);
    assert_eq!(v["divisibility"], 2);
    let last = &v["walls"][4];
    assert_eq!(last["a"], serde_json::json!([3, -1, 4]));
    assert_eq!(last["slope"], "1/3");
    assert_eq!(v["walls"][0]["slope"], "7/1");

    let o = run(&["fixed", "--genus", "9", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["fixed"]["main_theorem_count"], 1);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("lagwalls-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("strata.tsv");
    let o = run(&[
        "strata",
        "--genus",
        "4",
        "--format",
        "tsv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn every_subcommand_runs() {
    for sub in ["classes", "walls", "strata", "ledger", "fixed", "chain"] {
        for fmt in ["text", "json", "tsv"] {
            let o = run(&[sub, "--genus", "16", "--div", "2", "--format", fmt]);
            assert_eq!(o.status.code(), Some(0), "{sub} {fmt}");
            assert!(!o.stdout.is_empty());
        }
    }
}

#[test]
fn verify_and_mutation() {
    assert_eq!(run(&["verify", "--max-genus", "16"]).status.code(), Some(0));
    let o = run(&["verify", "--max-genus", "16", "--mutate", "ledger.g4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL pin ledger.g4"));
}
