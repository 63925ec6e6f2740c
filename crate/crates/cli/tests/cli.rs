use std::process::{Command, Output};

fn hellylat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hellylat")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn analyze_reports_lattice_profile() {
    let out = hellylat(&["analyze", "subspace:2:3", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["size"], 16);
    assert_eq!(v["profile"]["lattice"], true);
    assert!(v["bowtie"].is_null());
}

#[test]
fn analyze_reads_poset_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bowtie.json");
    std::fs::write(
        &path,
        r#"{"elements":[0,1,2,3,4,5],"covers":[[0,1],[0,2],[1,3],[1,4],[2,3],[2,4],[3,5],[4,5]]}"#,
    )
    .unwrap();
    let out = hellylat(&["analyze", "--file", path.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["profile"]["lattice"], false);
    assert_eq!(v["bowtie"].as_array().unwrap().len(), 4);
}

#[test]
fn generate_round_trips_through_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let out = hellylat(&["generate", "weak-order:3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let out = hellylat(&["analyze", "--file", path.to_str().unwrap()]);
    assert!(stdout(&out).contains("size 6"));
    assert!(stdout(&out).contains("lattice true"));
}

#[test]
fn query_subcommands() {
    let out = hellylat(&["garside", "--strands", "3", "multiply", "s1,s2", "s1"]);
    assert_eq!(stdout(&out).trim(), "d^1 |");
    let out = hellylat(&["coxeter", "--family", "c", "reduce", "-1,3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["point"]["coords"], serde_json::json!([1, 1]));
    let out = hellylat(&["coxeter", "--family", "a-extended", "compare", "0,0,0", "1,0,1"]);
    assert_eq!(stdout(&out).trim(), "less");
    let out = hellylat(&["affine", "--base", "boolean:3", "--denominator", "2", "distance", "const:0", "const:3/2"]);
    assert_eq!(stdout(&out).trim(), "3/2");
    let out = hellylat(&["helly", "--graph", "king:5x5", "window", "--core", "(2,2)", "--core", "(1,2)", "--radius", "2"]);
    assert_eq!(stdout(&out).trim(), "pass");
    let out = hellylat(&["helly", "--graph", "cycle:6", "balls", "0:1", "2:1", "4:1"]);
    assert!(stdout(&out).starts_with("violation"));
}

#[test]
fn suite_exit_codes() {
    let out = hellylat(&["suite", "loop-angle-numeric", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert_eq!(report["status"], "pass");
    for key in ["suite", "theorem", "status", "witness", "seed", "millis"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    let out = hellylat(&["suite", "no-such-suite"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hellylat(&["affine", "--base", "polar:2:4", "distance", "const:0", "const:1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn suite_reports_repeat_except_timing() {
    let run = || {
        let out = hellylat(&["suite", "helly-sanity", "semilattice", "--format", "json", "--seed", "11"]);
        assert!(out.status.success());
        stdout(&out)
            .lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
                v["millis"] = 0.into();
                v.to_string()
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}
