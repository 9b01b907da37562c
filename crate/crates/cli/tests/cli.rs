use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use blesseval::toy_embeddings;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blesseval"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

const CORPUS: &str = r#"{"id":"a","text":"Merry Christmas to my dear friend, may your holidays be full of joy and love and santa gifts","occasion":"Christmas","object":"Friend"}
{"id":"b","text":"Happy birthday to my wonderful mother, wishing you love and joy and many happy returns today","occasion":"Birthday","object":"Mom"}
{"id":"c","text":"too short","occasion":"Birthday","object":"Mom"}
{"id":"d","text":"merry   christmas to my dear friend, may your holidays be full of joy and love and santa gifts","occasion":"Christmas","object":"Friend"}
{"id":"e","text":"Wishing everyone a happy new year filled with joy and laughter and love for the whole family","occasion":"New Year","object":"General"}
"#;

fn embeddings(dir: &Path) -> PathBuf {
    let words: Vec<String> = CORPUS
        .lines()
        .flat_map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            blesseval::text::words(v["text"].as_str().unwrap())
        })
        .collect();
    let path = dir.join("vectors.txt");
    toy_embeddings(5, &words, 16).unwrap().write(&path).unwrap();
    path
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    assert_eq!(run(d, &["--help"]).status.code(), Some(0));
    assert_eq!(run(d, &["--version"]).status.code(), Some(0));
    assert_eq!(run(d, &["nonsense"]).status.code(), Some(1));
    assert_eq!(run(d, &["stats"]).status.code(), Some(1));
    assert_eq!(run(d, &["stats", "--in", "missing.jsonl"]).status.code(), Some(2));
    write(d, "bad.jsonl", "{not json}\n");
    let out = run(d, &["stats", "--in", "bad.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    write(d, "c.jsonl", CORPUS);
    assert_eq!(run(d, &["score", "--in", "c.jsonl", "--metrics", "nope"]).status.code(), Some(1));
    assert_eq!(run(d, &["score", "--in", "c.jsonl", "--metrics", "ble"]).status.code(), Some(1));
    assert_eq!(run(d, &["split", "--in", "c.jsonl", "--ratios", "0.5,0.5,0.5"]).status.code(), Some(1));
}

#[test]
fn clean_writes_kept_and_rejections() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(d, "c.jsonl", CORPUS);
    ok(d, &["clean", "--in", "c.jsonl", "--out", "kept.jsonl", "--rejections", "rej.csv"]);
    let kept = fs::read_to_string(d.join("kept.jsonl")).unwrap();
    let ids: Vec<String> = kept
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["id"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(ids, ["a", "b", "e"]);
    assert_eq!(fs::read_to_string(d.join("rej.csv")).unwrap(), "id,reason\nc,too_short\nd,duplicate\n");
}

#[test]
fn split_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(d, "c.jsonl", CORPUS);
    let a = ok(d, &["split", "--in", "c.jsonl", "--seed", "9"]);
    let b = ok(d, &["--jobs", "3", "split", "--in", "c.jsonl", "--seed", "9"]);
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 5);
    assert!(a.lines().all(|l| l.contains("\"split\":\"train\"")));
}

#[test]
fn bow_build_respects_train_split() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(d, "c.jsonl", CORPUS);
    write(d, "s.jsonl", "{\"id\":\"b\",\"split\":\"train\"}\n{\"id\":\"a\",\"split\":\"test\"}\n");
    ok(d, &["bow", "build", "--in", "c.jsonl", "--splits", "s.jsonl", "--size", "3", "--out", "bag.json"]);
    let bag: Value = serde_json::from_str(&fs::read_to_string(d.join("bag.json")).unwrap()).unwrap();
    let words: Vec<&str> = bag["words"].as_array().unwrap().iter().map(|w| w.as_str().unwrap()).collect();
    // record b only: "happy" twice, then alphabetical among singletons
    assert_eq!(words, ["happy", "birthday", "joy"]);
    assert_eq!(bag["role"], "blessing");
}

#[test]
fn freq_exclusion_modes() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(d, "c.jsonl", CORPUS);
    let has = |out: &str, w: &str| out.lines().any(|l| l.starts_with(&format!("{w},")));
    let labels = ok(d, &["freq", "--in", "c.jsonl"]);
    let bags = ok(d, &["freq", "--in", "c.jsonl", "--exclude", "bags"]);
    let none = ok(d, &["freq", "--in", "c.jsonl", "--exclude", "none"]);
    // "christmas" is a label word; "merry" and "love" are bag words only
    assert!(!has(&labels, "christmas") && has(&labels, "merry") && has(&labels, "love"));
    assert!(!has(&bags, "merry") && !has(&bags, "love"));
    assert!(has(&none, "christmas") && has(&none, "merry"));
    assert_eq!(labels.lines().next(), Some("word,count"));
    assert_eq!(ok(d, &["freq", "--in", "c.jsonl", "--top", "2"]).lines().count(), 3);
}

#[test]
fn score_report_is_stable_and_reproducible() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(d, "c.jsonl", CORPUS);
    embeddings(d);
    ok(d, &["bow", "build", "--in", "c.jsonl", "--size", "10", "--out", "bag.json"]);
    write(d, "refs.jsonl", "{\"text\":\"merry christmas my friend\"}\n".repeat(5).as_str());
    write(
        d,
        "lp.jsonl",
        "{\"logprobs\":[-1.0,-2.0]}\n{\"logprobs\":[-1.5]}\n{\"logprobs\":[]}\n{\"logprobs\":[-0.5]}\n{\"logprobs\":[-3.0]}\n",
    );
    let args = [
        "score", "--in", "c.jsonl", "--metrics", "ble,ent,bleu,rouge,distinct,wmd,ppl", "--refs", "refs.jsonl",
        "--logprobs", "lp.jsonl", "--embeddings", "vectors.txt", "--blessing-bag", "bag.json",
    ];
    let one = ok(d, &args);
    let mut jobs = vec!["--jobs", "4"];
    jobs.extend(args);
    assert_eq!(one, ok(d, &jobs));

    let report: Value = serde_json::from_str(&one).unwrap();
    let rows = report["rows"].as_array().unwrap();
    let ids: Vec<&str> = rows.iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["a", "b", "c", "d", "e"]);
    // no bag for the "General" object
    assert!(rows[4]["ent"].is_null());
    assert!(rows[2]["ppl"].is_null());
    assert_eq!(report["aggregate"]["ent"]["null"], 1);
    // pooled over 5 tokens: exp(8 / 5)
    let ppl = report["corpus"]["perplexity"].as_f64().unwrap();
    assert!((ppl - (8.0f64 / 5.0).exp()).abs() < 1e-12);
    assert_eq!(report["config"]["tool_version"], concat!("blesseval ", env!("CARGO_PKG_VERSION")));

    // the echoed config reproduces the report
    fs::write(d.join("echo.json"), serde_json::to_string(&report["config"]).unwrap()).unwrap();
    assert_eq!(ok(d, &["--config", "echo.json", "score", "--in", "c.jsonl"]), one);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(d, "c.jsonl", CORPUS);
    write(d, "cfg.json", r#"{"metrics":["ent"],"threshold_t":0.3,"bonus_unit":1.0}"#);
    let report: Value =
        serde_json::from_str(&ok(d, &["--config", "cfg.json", "score", "--in", "c.jsonl", "--threshold-t", "0.7"]))
            .unwrap();
    assert_eq!(report["config"]["threshold_t"], 0.7);
    assert_eq!(report["config"]["bonus_unit"], 1.0);
    write(d, "typo.json", r#"{"threshhold_t":0.3}"#);
    assert_eq!(run(d, &["--config", "typo.json", "score", "--in", "c.jsonl"]).status.code(), Some(1));
}

#[test]
fn kappa_reports_agreement_and_ties() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let rows = [[0, 0, 0], [1, 1, 1], [2, 2, 2], [0, 1, 2]];
    let body: String = rows
        .iter()
        .map(|r| format!("{{\"text\":\"t\",\"occasion\":\"Birthday\",\"object\":\"Mom\",\"ratings\":{r:?}}}\n"))
        .collect();
    write(d, "ann.jsonl", &body);
    let out = run(d, &["kappa", "--in", "ann.jsonl"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("1 item(s) had a tied majority"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // P_i = 1,1,1,0 -> P-bar 0.75; p_j = 1/3 each -> P-e 1/3; kappa = (0.75 - 1/3) / (2/3)
    assert!((v["kappa"].as_f64().unwrap() - 0.625).abs() < 1e-12);
    assert_eq!(v["majority_counts"], serde_json::json!([2, 1, 1]));
    write(d, "bad.jsonl", "{\"text\":\"t\",\"occasion\":\"a\",\"object\":\"b\",\"ratings\":[3]}\n");
    assert_eq!(run(d, &["kappa", "--in", "bad.jsonl"]).status.code(), Some(2));
}
