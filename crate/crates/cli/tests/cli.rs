use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const TWO_SENDERS: &str = r#"{
  "kind": "filtering",
  "ell": 4,
  "graph": {"k": 9, "edges": [[1, 2], [1, 5], [7, 8]]},
  "triplets": [[1, 2, [3, 4]], [1, 5, [6]], [7, 8, [9]]]
}"#;

const EQ5_PLAN: &str = r#"{
  "path": "t2",
  "protocols": [{"name": "eq-relay", "k": 5, "n": 1}],
  "function": {"kind": "equality"},
  "certificate": "eq5.json",
  "permutations": "from-matrix"
}"#;

const EQ5_CERT: &str = r#"{
  "kind": "filtering",
  "ell": 2,
  "graph": {"k": 5, "edges": [[5, 1], [1, 5], [2, 5], [3, 5], [4, 5], [1, 2], [3, 2]]},
  "triplets": [[5, 2, [4]]]
}"#;

fn nofmux(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nofmux"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("ex2.json"), TWO_SENDERS).unwrap();
    fs::write(dir.path().join("eq5.json"), EQ5_CERT).unwrap();
    fs::write(dir.path().join("plan.json"), EQ5_PLAN).unwrap();
    dir
}

#[test]
fn validate_reports_loads() {
    let dir = workspace();
    let o = nofmux(dir.path(), &["validate", "ex2.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("filtering set: valid"));
    assert!(text.contains("R(1)=3") && text.contains("R(7)=1"));
}

#[test]
fn validate_rejects_low_ell() {
    let dir = workspace();
    fs::write(dir.path().join("low.json"), TWO_SENDERS.replace("\"ell\": 4", "\"ell\": 3")).unwrap();
    let o = nofmux(dir.path(), &["validate", "low.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("INVALID"));
}

#[test]
fn validate_names_the_violated_condition() {
    let dir = workspace();
    // 3 is seen by sender 1
    fs::write(
        dir.path().join("seen.json"),
        r#"{"kind": "filtering", "ell": 3, "graph": {"k": 4, "edges": [[1, 3]]}, "triplets": [[1, 2, [3]]]}"#,
    )
    .unwrap();
    let o = nofmux(dir.path(), &["validate", "seen.json", "--out", "v.json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("v.json")).unwrap()).unwrap();
    assert_eq!(v["valid"], false);
    assert_eq!(v["violation"]["condition"], "filter-unseen");
}

#[test]
fn empty_certificate_is_valid() {
    let dir = workspace();
    fs::write(
        dir.path().join("empty.json"),
        r#"{"kind": "multiplexing", "graph": {"k": 3, "edges": []}, "permutations": [[1, 2, 3]], "triplets": []}"#,
    )
    .unwrap();
    let o = nofmux(dir.path(), &["validate", "empty.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn separate_graph_file() {
    let dir = workspace();
    fs::write(dir.path().join("g.json"), r#"{"k": 9, "edges": [[1, 2], [1, 5], [7, 8], [1, 3]]}"#).unwrap();
    let o = nofmux(dir.path(), &["validate", "ex2.json", "--graph", "g.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn matrix_marks_fixed_entries() {
    let dir = workspace();
    let o = nofmux(dir.path(), &["matrix", "ex2.json", "--out", "m.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("1 3 2* 4* 5* 6* 7 9 8*"));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    assert_eq!(m["rows"][1][1], 3);
    assert_eq!(m["rows"][2][1], 4);
    assert_eq!(m["rows"][3][4], 6);
    assert_eq!(m["rows"][1][7], 9);
    assert_eq!(m["fixed"][1][7], true);
    assert_eq!(m["fixed"][1][2], false);
    assert_eq!(m["row_of"], serde_json::json!([[2, 3], [4], [2]]));
}

#[test]
fn compile_then_verify() {
    let dir = workspace();
    let o = nofmux(dir.path(), &["compile", "plan.json", "--out", "d.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let d: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("d.json")).unwrap()).unwrap();
    assert_eq!(d["predicted_bound"], 3);
    assert_eq!(d["naive_baseline"], 4);
    assert_eq!(d["matrix"][1], serde_json::json!([1, 4, 3, 2, 5]));

    let o = nofmux(dir.path(), &["verify", "--plan", "plan.json", "--out", "r.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(r["correct"], true);
    assert_eq!(r["exhaustive"], true);
    assert_eq!(r["domain_size"], 1024);
    assert_eq!(r["measured_worst_case"], 3);
}

#[test]
fn compile_path_must_match_certificate() {
    let dir = workspace();
    let o = nofmux(dir.path(), &["compile", "plan.json", "--path", "t3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot use a filtering certificate"));
}

#[test]
fn outputs_are_reproducible() {
    let dir = workspace();
    for out in ["a.json", "b.json"] {
        let o = nofmux(dir.path(), &["verify", "--protocol", "blocked-xor", "--k", "3", "--n", "1", "--ell", "4", "--seed", "9", "--out", out]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let a = fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.json")).unwrap());
    let r: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(r["seed"], 9);
    assert_eq!(r["measured_worst_case"], 6);
}

#[test]
fn sampled_runs_are_labelled() {
    let dir = workspace();
    let o = nofmux(dir.path(), &["verify", "--protocol", "eq2", "--k", "5", "--n", "2", "--samples", "50", "--out", "s.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("not a proof"));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(r["exhaustive"], false);
}

#[test]
fn distinct_diagnostics() {
    let dir = workspace();
    let missing = nofmux(dir.path(), &["validate", "missing.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("cannot read missing.json"));

    fs::write(dir.path().join("broken.json"), "{\"kind\": ").unwrap();
    let broken = nofmux(dir.path(), &["validate", "broken.json"]);
    assert_eq!(broken.status.code(), Some(2));
    assert!(stderr(&broken).contains("malformed JSON"));

    let big = nofmux(dir.path(), &["verify", "--protocol", "eq2", "--k", "5", "--n", "2", "--budget", "100"]);
    assert_eq!(big.status.code(), Some(2));
    assert!(stderr(&big).contains("budget exceeded"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = workspace();
    assert_eq!(nofmux(dir.path(), &["verify", "--k", "3"]).status.code(), Some(2));
    assert_eq!(nofmux(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(nofmux(dir.path(), &["compile", "plan.json", "--path", "t9"]).status.code(), Some(2));
    let o = nofmux(dir.path(), &["verify", "--protocol", "nope", "--k", "3", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn restricted_view_plan_verifies() {
    let dir = workspace();
    fs::write(
        dir.path().join("t1.json"),
        r#"{
          "path": "t1",
          "protocols": [
            {"name": "forward", "k": 4, "n": 1, "variant": 1},
            {"name": "forward", "k": 4, "n": 1, "variant": 2},
            {"name": "forward", "k": 4, "n": 1, "variant": 3}
          ],
          "function": {"kind": "random", "seed": 4},
          "certificate": {"kind": "multiplexing", "graph": {"k": 4, "edges": [[4, 1]]},
                          "permutations": [[1, 2, 3, 4], [2, 1, 3, 4], [3, 2, 1, 4]],
                          "triplets": [[4, 1, [2, 3]]]}
        }"#,
    )
    .unwrap();
    let o = nofmux(dir.path(), &["verify", "--plan", "t1.json"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("worst case 4 bits, predicted 4"));
}

#[test]
fn demo_single_check() {
    let dir = workspace();
    let o = nofmux(dir.path(), &["demo", "--criterion", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("1/1 checks passed"));
}

#[test]
fn demo_quick() {
    let dir = workspace();
    let o = nofmux(dir.path(), &["demo", "--quick", "--out", "demo.json"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("9/9 checks passed"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("demo.json")).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 9);
}
