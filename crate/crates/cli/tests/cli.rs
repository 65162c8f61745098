use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn cwl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cwl"))
        .args(args)
        .env_remove("CWL_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Work(TempDir);

impl Work {
    fn new() -> Self {
        Work(TempDir::new().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }

    fn write(&self, name: &str, text: &str) -> String {
        fs::write(self.path(name), text).unwrap();
        self.s(name)
    }

    fn gen(&self, name: &str, family: &[&str]) -> String {
        let out = self.s(name);
        let mut args = vec!["gen"];
        args.extend_from_slice(family);
        args.extend_from_slice(&["-o", &out]);
        assert_eq!(code(&cwl(&args)), 0);
        out
    }
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_writes_canonical_graphs() {
    let o = cwl(&["gen", "path", "5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "{\"edges\":[[0,1],[1,2],[2,3],[3,4]],\"n\":5}\n");
    let star: Value = serde_json::from_str(&stdout(&cwl(&["gen", "subdivided-star", "3", "2"]))).unwrap();
    assert_eq!(star["n"], 10);
    let tree: Value = serde_json::from_str(&stdout(&cwl(&["gen", "subdivided-tree", "2", "1"]))).unwrap();
    assert_eq!(tree["n"], 19);
    assert_eq!(code(&cwl(&["gen", "cycle", "2"])), 1);
    assert_eq!(code(&cwl(&["gen", "path", "0"])), 1);
}

#[test]
fn path_pipeline_certificate_round_trip() {
    let w = Work::new();
    let g = w.gen("p.json", &["path", "400"]);
    let out = w.s("o.json");
    let o = cwl(&["pipeline", &g, "--c", "2", "--ell", "1", "--schedule", "minimal", "--audit", "-o", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc = json(&w.path("o.json"));
    assert_eq!(doc["outcome"], "certificate");
    assert!(!doc["audit"].as_array().unwrap().is_empty());
    assert_eq!(code(&cwl(&["verify", "certificate", &g, &out])), 0);

    // Dropping the centers of a nonempty bag breaks quasi-size.
    let mut cert = doc["payload"].clone();
    let bags = cert["bags"].as_array().unwrap().clone();
    let i = bags.iter().position(|b| !b.as_array().unwrap().is_empty()).unwrap();
    cert["bag_centers"][i] = Value::Array(Vec::new());
    let bad = w.write("bad.json", &cert.to_string());
    let o = cwl(&["verify", "certificate", &g, &bad]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("quasi-size"), "{}", stderr(&o));

    let o = cwl(&["verify", "certificate", &g, &out, "--a", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn tripod_pipeline_emits_a_verified_outcome() {
    let w = Work::new();
    let g = w.gen("s.json", &["subdivided-star", "3", "99"]);
    let out = w.s("o.json");
    let o = cwl(&["pipeline", &g, "--ell", "1", "--schedule", "minimal", "-o", &out]);
    let c = code(&o);
    assert!(c == 0 || c == 3, "{}", stderr(&o));
    let doc = json(&w.path("o.json"));
    let kind = if c == 0 { "certificate" } else { "witness" };
    assert_eq!(doc["outcome"], kind);
    assert_eq!(doc["audit"], Value::Array(Vec::new()));
    assert_eq!(code(&cwl(&["verify", kind, &g, &out])), 0);
    if c == 3 {
        let mut m = doc["payload"].clone();
        m["c"] = Value::from(10_000);
        let bad = w.write("bad.json", &m.to_string());
        let o = cwl(&["verify", "witness", &g, &bad]);
        assert_eq!(code(&o), 2);
        assert!(stderr(&o).contains("distance constraint"), "{}", stderr(&o));
    }
}

#[test]
fn pipeline_is_deterministic() {
    let w = Work::new();
    let g = w.gen("t.json", &["random-tree", "300", "4"]);
    let run = |name: &str| {
        let out = w.s(name);
        cwl(&["pipeline", &g, "--ell", "1", "--schedule", "minimal", "--tiebreak", "seed:9", "--audit", "-o", &out]);
        fs::read(w.path(name)).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn disconnected_input_is_split() {
    let w = Work::new();
    let g = w.write("d.json", r#"{"n": 7, "edges": [[0,1],[1,2],[4,5],[5,6]]}"#);
    let out = w.s("o.json");
    let o = cwl(&["pipeline", &g, "--ell", "1", "--schedule", "minimal", "-o", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(json(&w.path("o.json"))["payload"]["subject"], serde_json::json!([0, 1, 2, 3, 4, 5, 6]));
    assert_eq!(code(&cwl(&["verify", "certificate", &g, &out])), 0);
}

#[test]
fn errors_exit_one() {
    let w = Work::new();
    let bad = w.write("bad.json", "{\"n\": 3, \"edges\": [[0,1]");
    assert_eq!(code(&cwl(&["pipeline", &bad])), 1);
    let g = w.gen("p.json", &["path", "5"]);
    assert_eq!(code(&cwl(&["pipeline", &g, "--schedule", "fancy"])), 1);
    assert_eq!(code(&cwl(&["pipeline", &g, "--tiebreak", "seed:x"])), 1);
    assert_eq!(code(&cwl(&["pipeline", &g, "--c", "1"])), 1);
    assert_eq!(code(&cwl(&["pipeline", &w.s("missing.json")])), 1);
    assert_eq!(code(&cwl(&["frobnicate"])), 1);
    let o = Command::new(env!("CARGO_BIN_EXE_cwl"))
        .args(["pipeline", &g])
        .env("CWL_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn custom_schedule_file() {
    let w = Work::new();
    let g = w.gen("p.json", &["path", "200"]);
    let table = w.write("t.json", r#"{"d0": 46, "delta": [[46, 22, 10]]}"#);
    let o = cwl(&["pipeline", &g, "--ell", "1", "--schedule", &format!("@{table}")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn pathwidth_and_decomposition_verification() {
    let w = Work::new();
    let p = w.gen("p.json", &["path", "6"]);
    assert_eq!(stdout(&cwl(&["pathwidth", &p])).trim(), "1");
    let k4 = w.write("k4.json", r#"{"n":4,"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]}"#);
    let d = w.s("d.json");
    assert_eq!(stdout(&cwl(&["pathwidth", &k4, "-o", &d])).trim(), "3");
    assert_eq!(code(&cwl(&["verify", "decomposition", &k4, &d])), 0);
    assert_eq!(code(&cwl(&["verify", "decomposition", &k4, &d, "--width", "2"])), 2);
    let split = w.write("split.json", "[[0,1],[2,3]]");
    let o = cwl(&["verify", "decomposition", &k4, &split]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("edge containment"));
    let h2 = w.gen("h2.json", &["subdivided-tree", "2", "0"]);
    assert_eq!(stdout(&cwl(&["pathwidth", &h2])).trim(), "2");
    let big = w.gen("big.json", &["path", "40"]);
    assert_eq!(code(&cwl(&["pathwidth", &big])), 1);
}

#[test]
fn quasi_isometry_verification() {
    let w = Work::new();
    let p = w.gen("p.json", &["path", "4"]);
    let q = w.gen("q.json", &["path", "2"]);
    let ok = w.write("ok.json", r#"{"phi":[0,0,1,1],"L":1,"C":2}"#);
    assert_eq!(code(&cwl(&["verify", "qi", &p, &q, &ok])), 0);
    let bad = w.write("bad.json", r#"{"phi":[0,0,0,0],"L":1,"C":0}"#);
    assert_eq!(code(&cwl(&["verify", "qi", &p, &q, &bad])), 2);
}

#[test]
fn fatminor_find_and_verify() {
    let w = Work::new();
    let s = w.gen("s.json", &["subdivided-star", "3", "19"]);
    let m = w.s("m.json");
    let o = cwl(&["fatminor", "find", &s, "--ell", "1", "--c", "2", "-o", &m]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert_eq!(code(&cwl(&["fatminor", "verify", &s, &m])), 0);
    assert_eq!(code(&cwl(&["verify", "witness", &s, &m, "--ell", "1"])), 0);
    assert_eq!(code(&cwl(&["verify", "witness", &s, &m, "--ell", "2"])), 2);

    let mut model = json(&w.path("m.json"));
    model["eta"]["v0"] = serde_json::json!([0, 2]);
    let bad = w.write("bad.json", &model.to_string());
    assert_eq!(code(&cwl(&["fatminor", "verify", &s, &bad])), 2);

    let p = w.gen("p.json", &["path", "30"]);
    let o = cwl(&["fatminor", "find", &p, "--ell", "1", "--c", "2"]);
    assert_eq!(code(&o), 0);
    let verdict = stdout(&o);
    assert!(verdict.starts_with("absent") || verdict.contains("incomplete"), "{verdict}");
}
