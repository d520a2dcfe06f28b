use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn pqlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqlab")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn learn_dag_on_diamond() {
    let out = pqlab(&["learn", "dag", "--file", &data("diamond.json"), "--players", "2", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["queries_used"], 8);
    assert_eq!(v["verdict"], "equivalent");
}

#[test]
fn half_ne_on_random_ten_by_ten() {
    let out = pqlab(&["solve", "bimatrix", "--algo", "half-ne", "--gen", "random:k=10,seed=7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["queries_used"], 19);
    let regret = pqlab::format::parse_scalar::<pqlab::Rational>(v["regret"].as_str().unwrap()).unwrap();
    assert!(regret <= pqlab::Rational::new(1, 2));
    assert!(v["wall_time_ms"].is_u64());
}

#[test]
fn adversary_forces_logarithmic_queries() {
    let trace = scratch("adversary.jsonl");
    let out = pqlab(&[
        "solve",
        "parallel-links",
        "--gen",
        "step:m=2,n=1024",
        "--adversary",
        "--emit-trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let used = v["queries_used"].as_u64().unwrap();
    assert!(used >= 10, "{used}");
    let lines = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(lines.lines().count() as u64, used);
    for line in lines.lines() {
        let entry: Value = serde_json::from_str(line).unwrap();
        assert!(entry["query"].is_array() && entry["response"].is_array());
    }
}

#[test]
fn gen_output_round_trips_and_solves() {
    let game = scratch("links.json");
    let out = pqlab(&["gen", "--gen", "step:m=4,n=200", "--seed", "11", "--out", game.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&game).unwrap();
    let parsed = pqlab::format::AnyGame::<pqlab::Rational>::from_json(&text).unwrap();
    assert_eq!(parsed.to_json(), text.trim_end());
    let out = pqlab(&["solve", "parallel-links", "--game", game.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["loads"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).sum::<u64>(), 200);
}

#[test]
fn same_spec_same_bytes() {
    let args = ["solve", "dag", "--gen", "dag:v=6,e=10,n=3,chains=2", "--seed", "5", "--no-timing"];
    let a = pqlab(&args);
    let b = pqlab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["verdict"], "equilibrium");
}

#[test]
fn verify_reports_deviation() {
    let profile = scratch("stacked.json");
    std::fs::write(&profile, r#"{"type":"congestion","entries":[{"path":[0,2],"load":2}]}"#).unwrap();
    let out = pqlab(&["verify", "--game", &data("diamond.json"), "--profile", profile.to_str().unwrap()]);
    // both players pay 1, and a lone deviator on the other route pays 1 too
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "equilibrium");
    let lopsided = scratch("lopsided_game.json");
    std::fs::write(&lopsided, r#"{"type":"parallel-links","players":2,"costs":[["0","1","5"],["0","1","5"]]}"#)
        .unwrap();
    let stacked = scratch("stacked_links.json");
    std::fs::write(&stacked, r#"{"type":"congestion","entries":[{"path":[0],"load":2}]}"#).unwrap();
    let out = pqlab(&["verify", "--game", lopsided.to_str().unwrap(), "--profile", stacked.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["improvement"], "4");
    assert_eq!(v["verdict"], "not-equilibrium");
    assert_eq!(v["alternative"], serde_json::json!([1]));
}

#[test]
fn exit_codes() {
    assert_eq!(
        pqlab(&["solve", "bimatrix", "--gen", "random:k=4", "--seed", "1", "--budget", "2"]).status.code(),
        Some(3)
    );
    assert_eq!(pqlab(&["solve", "dag", "--gen", "dag:v=5,e=7"]).status.code(), Some(4));
    assert_eq!(pqlab(&["solve", "bimatrix", "--game", "/nonexistent.json"]).status.code(), Some(4));
    assert_eq!(pqlab(&["solve", "bimatrix", "--game", &data("diamond.json")]).status.code(), Some(4));
    assert_eq!(pqlab(&["frobnicate"]).status.code(), Some(4));
}

#[test]
fn bench_tables() {
    let out = pqlab(&["bench", "graphical", "--seed", "1", "--n", "6", "--k", "2", "--d", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let row = rows.records().next().unwrap().unwrap();
    assert_eq!(&row[6], "22");
    assert_eq!(&row[8], "64");

    let out = pqlab(&["bench", "dag", "--seed", "3", "--m", "4,8,12", "--n", "1,2,3,4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    for row in rows.records() {
        let row = row.unwrap();
        let (n, m, q): (usize, usize, usize) =
            (row[1].parse().unwrap(), row[2].parse().unwrap(), row[6].parse().unwrap());
        assert_eq!(q, n * m);
    }

    let out = pqlab(&["bench", "parallel-links", "--seed", "2", "--m", "8", "--n", "256,4096,65536"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let mut last = 0;
    for row in rows.records() {
        let row = row.unwrap();
        let (q, bound): (usize, usize) = (row[6].parse().unwrap(), row[7].parse().unwrap());
        assert!(q <= bound && q >= last);
        last = q;
    }
}
