use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use disclose::welfare::social_welfare;
use disclose::{BipartiteGraph, Exact, MassKind, RevealSet};
use serde_json::Value;

fn disclose(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_disclose")).args(args).env_remove("DISCLOSE_THREADS").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = disclose(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    disclose(args).status.code().unwrap()
}

/// Rows of a CSV as header-keyed maps.
fn rows(csv: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    r.records().map(|rec| header.iter().cloned().zip(rec.unwrap().iter().map(String::from)).collect()).collect()
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn posneg_greedy_and_bruteforce() {
    let out = ok(&["reveal", "--fixture", "FAM-POSNEG:3", "--algos", "greedy,bruteforce", "--K", "4"]);
    let rows = rows(&out);
    let welfare = |algo: &str| rows.iter().find(|r| r["algorithm"] == algo).unwrap()["welfare"].clone();
    assert_eq!(welfare("greedy"), "5.0");
    assert_eq!(welfare("bruteforce"), "9.0");
    assert_eq!(welfare("full"), "9.0");
}

#[test]
fn tab7_heuristic_ratio() {
    let out = ok(&["fixture", "TAB7", "--algos", "greedy,heuristic,interactive", "--K", "3"]);
    let rows = rows(&out);
    let heuristic = rows.iter().find(|r| r["algorithm"] == "heuristic").unwrap();
    let ratio: f64 = heuristic["ratio"].parse().unwrap();
    assert_eq!(format!("{ratio:.2}"), "0.96");
}

#[test]
fn zero_budget_keeps_empty_welfare() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "g.json");
    std::fs::write(&g, disclose::graphgen::make_fixture(&"TAB7".parse().unwrap()).unwrap().to_json()).unwrap();
    let out = ok(&[
        "reveal",
        "--graph",
        s(&g),
        "--K",
        "0",
        "--d",
        "1",
        "--algos",
        "greedy,proxy-greedy,bruteforce,lookahead,heuristic,heuristic-random,interactive,random",
    ]);
    let rows = rows(&out);
    let empty = rows.iter().find(|r| r["algorithm"] == "none").unwrap()["welfare"].clone();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().filter(|r| r["algorithm"] != "full").all(|r| r["welfare"] == empty));
    assert!(rows.iter().all(|r| r["graph"] == "g"));
}

#[test]
fn json_rows_revalidate() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "r.csv");
    ok(&["fixture", "FAM-TIE:3", "--algos", "greedy,lookahead,heuristic,random", "--K", "2,3", "--out", s(&out)]);
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    let g = disclose::graphgen::make_fixture(&"FAM-TIE:3".parse().unwrap()).unwrap();
    let details = summary["rows"].as_array().unwrap();
    assert_eq!(details.len(), 10);
    for row in details {
        let set: RevealSet = row["solution"].as_array().unwrap().iter().map(|t| t.as_u64().unwrap() as usize).collect();
        let f = social_welfare::<Exact>(&g, &set, MassKind::True).unwrap();
        assert_eq!(row["welfare"].as_str().unwrap(), f.to_string());
    }
    assert_eq!(summary["backend"], "exact");
    let csv = rows(&std::fs::read_to_string(&out).unwrap());
    let deep = csv.iter().find(|r| r["algorithm"] == "lookahead" && r["K"] == "3").unwrap();
    assert_eq!(deep["welfare"], "9.0");
    assert_eq!(deep["d"], "2");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (i, args) in [
        vec!["reveal", "--fixture", "TAB7", "--algos", "greedy,random,heuristic-random", "--K", "1,2,3", "--seed", "7"],
        vec!["learn", "--synthetic", "80,12,0.2,0.4", "--K", "1,3", "--trials", "20", "--seed", "3"],
        vec!["intervene", "--fixture", "FIG2", "--K", "1,2", "--B", "0,1,2"],
    ]
    .into_iter()
    .enumerate()
    {
        let a = path(dir.path(), &format!("a{i}.csv"));
        let b = path(dir.path(), &format!("b{i}.csv"));
        ok(&[args.clone(), vec!["--out", s(&a)]].concat());
        ok(&[args.clone(), vec!["--out", s(&b)]].concat());
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{args:?}");
        let text = std::fs::read_to_string(&a).unwrap();
        assert!(!text.contains('\r'));
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["learn", "--fixture", "TAB7", "--K", "2", "--trials", "10"];
    let default = ok(&args);
    let single = Command::new(env!("CARGO_BIN_EXE_disclose")).args(args).env("DISCLOSE_THREADS", "1").output().unwrap();
    assert_eq!(String::from_utf8(single.stdout).unwrap(), default);
    let bad = Command::new(env!("CARGO_BIN_EXE_disclose")).args(args).env("DISCLOSE_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn learn_schema() {
    let out = ok(&["learn", "--fixture", "FIG2", "--K", "1,2", "--trials", "4", "--train-ratio", "0.5"]);
    assert!(out.starts_with("dataset,method,param,K,trial,split,metric,value\n"));
    let rows = rows(&out);
    assert_eq!(rows.len(), 2 * 4 * 7);
    assert!(rows.iter().all(|r| ["train", "test", "gap"].contains(&r["split"].as_str())));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "c.json");
    std::fs::write(&cfg, r#"{"fixture": "FIG2", "K": [1], "algos": ["greedy"], "mode": "negative"}"#).unwrap();
    let rows = rows(&ok(&["reveal", "--config", s(&cfg), "--K", "2"]));
    let greedy = rows.iter().find(|r| r["algorithm"] == "greedy").unwrap();
    assert_eq!((greedy["K"].as_str(), greedy["mode"].as_str(), greedy["welfare"].as_str()), ("2", "negative", "4.0"));

    std::fs::write(&cfg, r#"{"fixture": "FIG2", "budget": 3}"#).unwrap();
    assert_eq!(code(&["reveal", "--config", s(&cfg)]), 2);
    std::fs::write(&cfg, r#"{"command": "learn", "fixture": "FIG2"}"#).unwrap();
    assert_eq!(code(&["reveal", "--config", s(&cfg)]), 2);
    assert_eq!(code(&["reveal", "--config", s(&path(dir.path(), "missing.json"))]), 2);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["reveal"]), 2);
    assert_eq!(code(&["reveal", "--fixture", "FIG2", "--algos", "simulated-annealing"]), 2);
    assert_eq!(code(&["reveal", "--fixture", "FIG2", "--algos", "lookahead", "--K", "1", "--d", "3"]), 2);
    assert_eq!(code(&["reveal", "--fixture", "FIG2", "--backend", "bignum"]), 2);
    assert_eq!(code(&["reveal", "--graph", "/nonexistent/g.json"]), 3);
    assert_eq!(code(&["reveal", "--fixture", "FAM-EXP:20", "--algos", "bruteforce", "--K", "12"]), 4);
    assert_eq!(code(&["reveal", "--fixture", "FIG2", "--c", "1"]), 3);
    assert_eq!(code(&["fairness", "--fixture", "FIG2"]), 2);
    assert_eq!(code(&["fixture", "NOPE"]), 2);
}

#[test]
fn implicit_optimum_is_skipped_when_too_large() {
    let rows = rows(&ok(&["fixture", "FAM-EXP:20", "--algos", "greedy", "--K", "12"]));
    let greedy = rows.iter().find(|r| r["algorithm"] == "greedy").unwrap();
    assert_eq!((greedy["opt_welfare"].as_str(), greedy["ratio"].as_str()), ("", ""));
    assert_eq!(code(&["fixture", "FAM-EXP:20", "--K", "12"]), 4);
}

#[test]
fn proxy_guarantee_reported_with_c() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "p.csv");
    ok(&["fixture", "FIG2", "--algos", "proxy-greedy", "--c", "2", "--out", s(&out)]);
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    let row = &summary["rows"][2];
    let welfare = disclose::Scalar::to_f64(&Exact::new(8, 3));
    assert_eq!(row["algorithm"], "proxy-greedy");
    assert!(row["proxy_guarantee"].as_f64().unwrap() <= welfare);
}

#[test]
fn fairness_with_groups() {
    let rows = rows(&ok(&["fairness", "--fixture", "FIG2", "--groups", "0,0,1,1", "--algos", "proxy-greedy", "--K", "2"]));
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["gain"] == "0.6666666666666666" && r["group_budget"] == "1"));
    let rows = self::rows(&ok(&["fairness", "--fixture", "FAM-NEG:4", "--algos", "prioritized", "--priority", "1", "--K", "5", "--opt"]));
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| !r["opt_gain"].is_empty()));
}

#[test]
fn gen_from_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let data = path(dir.path(), "toy.csv");
    let mut text = String::from("x,y,color,label\n");
    for i in 0..40 {
        let color = ["red", "green", "blue"][i % 3];
        text.push_str(&format!("{},{},{color},{}\n", i % 7, (i * 3) % 11, if i % 4 == 0 { "yes" } else { "no" }));
    }
    std::fs::write(&data, text).unwrap();
    let out = path(dir.path(), "graphs");
    ok(&["gen", "--input", s(&data), "--label", "label", "--positive", "yes", "--params", "1,2", "--out", s(&out)]);
    let stats = rows(&std::fs::read_to_string(out.join("stats.csv")).unwrap());
    assert_eq!(stats.len(), 2);
    for (row, k) in stats.iter().zip([1, 2]) {
        assert_eq!(row["method"], "kmax");
        let g = BipartiteGraph::from_json(&std::fs::read_to_string(out.join(format!("toy-kmax-{k}.json"))).unwrap()).unwrap();
        assert!((0..g.num_agents()).all(|x| g.neighbors(x).len() == k));
        assert_eq!(row["n"], g.num_agents().to_string());
        assert_eq!(row["avg_lhs"], format!("{k}.0"));
    }
    let learn = ok(&["learn", "--input", s(&data), "--label", "label", "--positive", "yes", "--params", "2", "--K", "1", "--trials", "2"]);
    assert!(rows(&learn).iter().all(|r| r["dataset"] == "toy" && r["param"] == "2"));
    assert_eq!(code(&["gen", "--input", s(&data), "--out", s(&out)]), 2);
    assert_eq!(code(&["gen", "--input", s(&data), "--label", "nope", "--out", s(&out)]), 3);
}

#[test]
fn coverage_grid() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "inst.csv");
    std::fs::write(&inst, "kind,x,y\nagent,3,4\nagent,0,1\ntarget,0,0\n").unwrap();
    let rows = rows(&ok(&["coverage", "--input", s(&inst), "--R", "0,1,5"]));
    let covered: Vec<&str> = rows.iter().map(|r| r["welfare"].as_str()).collect();
    assert_eq!(covered, vec!["0.0", "1.0", "2.0"]);
    std::fs::write(&inst, "kind,x\nrobot,1\nagent,2\n").unwrap();
    assert_eq!(code(&["coverage", "--input", s(&inst)]), 3);
}
