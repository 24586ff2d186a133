use std::process::{Command, Output};

use alphacf::cf::Expansion;
use alphacf::domain::RectUnion;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alphacf"))
        .args(args)
        .env_remove("ALPHACF_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn strip_manifest(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("manifest");
    v
}

#[test]
fn expand_worked_example() {
    let v = json(&["expand", "--x", "quad:(-3,1,4,17)", "--alpha", "0.9"]);
    assert_eq!(v["text"], "[0; 3, 1, 1 | period: 3, 1, 1]");
    let cs = v["convergents"].as_array().unwrap();
    let tail: Vec<(i64, i64)> = cs.iter().map(|c| (c["p"].as_i64().unwrap(), c["q"].as_i64().unwrap())).collect();
    assert!(tail.contains(&(16, 57)));
    let v = json(&["expand", "--x", "quad:(-3,1,4,17)", "--alpha", "0.45"]);
    assert_eq!(v["text"], "[0; 4, -2 | period: 4, -2]");
}

#[test]
fn expand_zero_is_empty() {
    let v = json(&["expand", "--x", "rat:0/1"]);
    assert_eq!(v["text"], "[0]");
    assert_eq!(v["expansion"]["preperiod"].as_array().unwrap().len(), 0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["expand", "--x", "nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["expand", "--x", "2", "--alpha", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["legendre", "--alpha", "0.35"]).status.code(), Some(0));
    assert_eq!(run(&["--precision-bits", "100000", "expand", "--x", "0.1"]).status.code(), Some(3));
    let out = run(&["expand", "--x", "nonsense"]);
    assert!(!out.stderr.is_empty() && out.stdout.is_empty());
}

#[test]
fn domain_strip_endpoints() {
    let v = json(&["domain", "--alpha", "0.52", "--K", "3"]);
    let dom: RectUnion = serde_json::from_value(v["domain"].clone()).expect("domain JSON reads back");
    let a = alphacf::parse_surd("0.52").unwrap();
    let one = alphacf::QuadSurd::one();
    let p = &one - &(&a * 2);
    let ends = [&p / &a, &p / &(&a - &one)];
    for e in ends {
        assert!(dom.rects.iter().any(|r| r.t_lo == e || r.t_hi == e), "missing strip end {e}");
    }
    let out = run(&["--format", "csv", "--digits", "6", "domain", "--alpha", "0.52", "--K", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# manifest: {"));
    assert_eq!(lines.next().unwrap(), "t_lo,t_hi,v_lo,v_hi,edges,k,family");
    assert!(text.contains("0.076923"));
    assert!(text.contains("0.083333"));
}

#[test]
fn rewrite_matches_direct_expansion() {
    let start = json(&["expand", "--x", "rat:5/17", "--alpha", "1"]);
    let target = json(&["expand", "--x", "rat:5/17", "--alpha", "0.5"]);
    // the whole expand document is accepted as input
    let doc = serde_json::to_string(&start).unwrap();
    let v = json(&["rewrite", "--expansion", &doc, "--alpha", "0.5"]);
    assert_eq!(v["expansion"], target["expansion"]);
    assert!(!v["trace"].as_array().unwrap().is_empty());
    let e: Expansion = serde_json::from_value(v["expansion"].clone()).unwrap();
    let text = json(&["rewrite", "--expansion", "[0; 3, 2, 2]", "--alpha", "0.5"]);
    assert_eq!(text["text"], e.to_string());
}

#[test]
fn seeded_runs_repeat() {
    let args = ["--seed", "11", "orbit", "--alpha", "0.7", "--n", "200"];
    let a = strip_manifest(json(&args));
    let b = strip_manifest(json(&args));
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let c = strip_manifest(json(&["--seed", "12", "orbit", "--alpha", "0.7", "--n", "200"]));
    assert_ne!(a, c);
    assert_eq!(a["samples"].as_array().unwrap().len(), 200);
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_alphacf"))
        .args(["orbit", "--alpha", "0.7", "--n", "5"])
        .env("ALPHACF_PRECISION_BITS", "53")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["manifest"]["config"]["global"]["precision_bits"], 53);
}

#[test]
fn csv_to_file() {
    let dir = std::env::temp_dir().join(format!("alphacf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("orbit.csv");
    let out = run(&["--format", "csv", "--out", path.to_str().unwrap(), "orbit", "--alpha", "1", "--x", "rat:5/17"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[2].starts_with("3,0.000000000000,"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn statistics_commands() {
    let v = json(&["entropy", "--alpha", "0.8", "--n", "200000", "--burn-in", "100"]);
    let est = v["estimate"].as_f64().unwrap();
    let exp = v["expected"].as_f64().unwrap();
    assert!((est - exp).abs() / exp < 0.03);
    let v = json(&["theta-dist", "--alpha", "1", "--n", "100000", "--grid", "10"]);
    assert_eq!(v["grid"].as_array().unwrap().len(), 10);
    assert!(v["max_abs_dev"].as_f64().unwrap() < 0.02);
    let v = json(&[
        "measure-check",
        "--alpha",
        "0.8",
        "--t-lo",
        "0.1",
        "--t-hi",
        "0.2",
        "--v-lo",
        "0.1",
        "--v-hi",
        "0.3",
        "--n",
        "200000",
    ]);
    assert_eq!(v["exact_equal"], true);
    assert!(v["z"].as_f64().unwrap().abs() < 5.0);
}

#[test]
fn legendre_report() {
    let v = json(&["--seed", "3", "legendre", "--alpha", "1", "--Q", "100", "--nx", "20"]);
    assert_eq!(v["L_closed_form"].as_f64().unwrap(), 0.5);
    assert_eq!(v["violations"], 0);
    assert!(v["empirical_min"].as_f64().unwrap() >= 0.5);
    assert!(v["witness"]["q"].as_i64().unwrap() <= 100);
    let v = json(&["legendre", "--alpha", "0.3", "--Q", "50", "--nx", "5"]);
    assert!(v["L_closed_form"].is_null());
    assert_eq!(v["bounds"]["r"], 3);
}

#[test]
fn fundamental_interval_catalog() {
    let v = json(&["fundamental-interval", "--prefix", "3,-2"]);
    assert_eq!(v["hi"], "quad:(-1,1,1,2)");
    assert_eq!(v["hi_closed"], true);
    assert_eq!(run(&["fundamental-interval", "--prefix", "1,1,1,1,1,1,1,1,5"]).status.code(), Some(2));
}
