use std::path::{Path, PathBuf};

use serde_json::Value;
use tempfile::TempDir;
use wfa_aak::ensemble::{random_instance, EnsembleConfig};
use wfa_aak_cli::document::{emit_wfa, parse_wfa};
use wfa_aak_cli::main_with;

const SIX: &str = r#"{
  "alphabet_size": 1,
  "states": 3,
  "alpha": [1.650, -0.851, 0.038],
  "matrix": [[0.579, 0.461, 0.046], [-0.461, -0.192, 0.225], [0.046, -0.225, -0.387]],
  "beta": [1.650, 0.851, 0.038]
}"#;

const EXAMPLE: &str = r#"{
  "alphabet_size": 1,
  "states": 2,
  "alpha": [0.8660254037844386, 0.0],
  "matrix": [[0.0, 0.5], [0.5, 0.0]],
  "beta": [0.8660254037844386, 0.0]
}"#;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("wfa-aak").chain(args.iter().copied());
    let code = main_with(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn eval_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let ex = file(&dir, "example.wfa", EXAMPLE);
    let r = cli(&["eval", s(&ex), "2"]);
    assert_eq!(r.code, 0);
    let v: f64 = r.out.trim().parse().unwrap();
    assert!((v - 0.1875).abs() < 1e-15);
    let r = cli(&["eval", s(&ex), "3"]);
    assert_eq!(r.out.trim().parse::<f64>().unwrap(), 0.0);
}

#[test]
fn info_lists_singular_numbers() {
    let dir = TempDir::new().unwrap();
    let ex = file(&dir, "example.wfa", EXAMPLE);
    let r = cli(&["info", s(&ex), "--format", "json"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["states"], 2);
    let sv = v["singular_numbers"].as_array().unwrap();
    assert!((sv[0].as_f64().unwrap() - 0.8).abs() < 1e-12);
    assert!((sv[1].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert!((v["spectral_radius"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn approximate_reports_three_state_example() {
    let dir = TempDir::new().unwrap();
    let six = file(&dir, "six.wfa", SIX);
    let r = cli(&["approximate", s(&six), "--states", "2"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["k"], 2);
    assert_eq!(v["passed"], true);
    assert_eq!(v["degenerate"], false);
    assert_eq!(v["approximant"]["states"], 2);
    // the printed model is only balanced to three decimals, so the
    // rebalanced eigenvalues agree with the printed ones to about 1e-3
    for ev in v["eigenvalues"].as_array().unwrap() {
        let re = ev[0].as_f64().unwrap();
        let im = ev[1].as_f64().unwrap();
        assert!((re - 0.204593).abs() < 2e-3 && (im.abs() - 0.278322).abs() < 2e-3, "{ev}");
    }
    let d = &v["diagnostics"];
    let sigma_k = v["sigma_k"].as_f64().unwrap();
    assert!((d["certified_error"].as_f64().unwrap() - sigma_k).abs() < 1e-7 * sigma_k);
    assert_eq!(d["truncation"], 256);
    assert_eq!(d["allpass"].as_array().unwrap().len(), 3);
}

#[test]
fn approximate_text_report_and_files() {
    let dir = TempDir::new().unwrap();
    let six = file(&dir, "six.wfa", SIX);
    let report = dir.path().join("report.txt");
    let r = cli(&["approximate", s(&six), "-k", "2", "--report", s(&report), "--format", "text"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let approx = parse_wfa(&r.out).unwrap();
    assert_eq!(approx.states(), 2);
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("passed: true"));
    assert!(text.contains("check certificate"));
}

#[test]
fn degenerate_run_carries_recommendation() {
    let dir = TempDir::new().unwrap();
    let ex = file(&dir, "example.wfa", EXAMPLE);
    let r = cli(&["approximate", s(&ex), "-k", "1"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["degenerate"], true);
    assert!(v["recommendation"].as_str().unwrap().contains("k = 2"));
    assert!((v["sigma_k"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert!(r.err.contains("k = 2"));
}

#[test]
fn verify_of_identical_pair_is_exact() {
    let dir = TempDir::new().unwrap();
    let six = file(&dir, "six.wfa", SIX);
    let r = cli(&["verify", s(&six), s(&six)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    let d = &v["diagnostics"];
    assert_eq!(v["sigma_k"].as_f64().unwrap(), 0.0);
    assert_eq!(d["section_error"].as_f64().unwrap(), 0.0);
    assert_eq!(d["l2_error"].as_f64().unwrap(), 0.0);
    assert!(d["certified_error"].as_f64().unwrap() < 1e-12);
}

#[test]
fn approximate_then_verify_random_seeds() {
    let dir = TempDir::new().unwrap();
    let cfg = EnsembleConfig::default();
    let mut failures = Vec::new();
    for seed in 0..100 {
        let inst = random_instance(seed, &cfg).unwrap();
        let input = file(&dir, "input.wfa", &emit_wfa(&inst.wfa));
        let report = dir.path().join("report.json");
        let k = inst.k.to_string();
        let a = cli(&["approximate", s(&input), "-k", &k, "--report", s(&report)]);
        if a.code != 0 {
            failures.push((seed, "approximate", a.err));
            continue;
        }
        let approx = file(&dir, "approx.wfa", &a.out);
        let v = cli(&["verify", s(&input), s(&approx)]);
        if v.code != 0 {
            failures.push((seed, "verify", v.out + &v.err));
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn bench_emits_csv() {
    let r = cli(&["bench", "--seeds", "8", "--max-states", "5", "--sequential"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(
        lines[0],
        "seed,n,k,sigma_k,aak_section_error,sva_trunc_error,allpass_r1,allpass_r2,allpass_r3,\
         unimod_residual,l2_error,degenerate,millis"
    );
    assert_eq!(lines.len(), 9);
    for (i, line) in lines[1..].iter().enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 13);
        assert_eq!(cols[0], i.to_string());
        let n: usize = cols[1].parse().unwrap();
        assert!((2..=5).contains(&n));
        let aak: f64 = cols[4].parse().unwrap();
        let trunc: f64 = cols[5].parse().unwrap();
        assert!(aak <= trunc + 1e-8);
    }
}

#[test]
fn bench_rejects_bad_configuration() {
    let r = cli(&["bench", "--seeds", "2", "--max-states", "1"]);
    assert_eq!(r.code, 5);
    let r = cli(&["bench", "--seeds", "2", "--max-states", "4", "--rho-cap", "1.2"]);
    assert_eq!(r.code, 5);
}

#[test]
fn minimize_and_sva_emit_documents() {
    let dir = TempDir::new().unwrap();
    let padded = file(
        &dir,
        "padded.wfa",
        r#"{"alphabet_size": 1, "states": 3,
            "alpha": [0.8660254037844386, 0.0, 1.0],
            "matrix": [[0.0, 0.5, 0.0], [0.5, 0.0, 0.0], [0.0, 0.0, 0.3]],
            "beta": [0.8660254037844386, 0.0, 0.0]}"#,
    );
    let r = cli(&["minimize", s(&padded)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let m = parse_wfa(&r.out).unwrap();
    assert_eq!(m.states(), 2);
    for t in 0..10 {
        let want = if t % 2 == 0 { 0.75 * 0.5f64.powi(t as i32) } else { 0.0 };
        assert!((m.evaluate(t) - want).abs() < 1e-12);
    }
    let r = cli(&["sva", s(&padded)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    let sv: Vec<f64> = v["metadata"]["singular_numbers"]
        .as_str()
        .unwrap()
        .split(' ')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(sv.len(), 2);
    assert!((sv[0] - 0.8).abs() < 1e-12 && (sv[1] - 0.2).abs() < 1e-12);
}

#[test]
fn failures_map_to_distinct_codes() {
    let dir = TempDir::new().unwrap();
    let six = file(&dir, "six.wfa", SIX);
    let missing = dir.path().join("missing.wfa");
    let r = cli(&["eval", s(&missing), "1"]);
    assert_eq!(r.code, 3);
    assert!(r.err.contains("stage io"));

    let two = file(&dir, "two.wfa", &SIX.replace("\"alphabet_size\": 1", "\"alphabet_size\": 2"));
    let r = cli(&["info", s(&two)]);
    assert_eq!(r.code, 4);
    assert!(r.err.contains("one-letter"));

    let broken = file(&dir, "broken.wfa", "{\"alphabet_size\": 1,\n \"states\": }");
    let r = cli(&["info", s(&broken)]);
    assert_eq!(r.code, 4);
    assert!(r.err.contains("line 2"), "{}", r.err);

    let unstable = file(
        &dir,
        "unstable.wfa",
        r#"{"alphabet_size": 1, "states": 1, "alpha": [1], "matrix": [[1.5]], "beta": [1]}"#,
    );
    let r = cli(&["approximate", s(&unstable), "-k", "1"]);
    assert_eq!(r.code, 5);

    let r = cli(&["approximate", s(&six), "-k", "3"]);
    assert_eq!(r.code, 12);
    assert!(r.err.contains("stage partition"));

    let r = cli(&["approximate", s(&six)]);
    assert_eq!(r.code, 2);
}

#[test]
fn binary_exit_status() {
    let dir = TempDir::new().unwrap();
    let ex = file(&dir, "example.wfa", EXAMPLE);
    let bin = env!("CARGO_BIN_EXE_wfa-aak");
    let out = std::process::Command::new(bin).args(["eval", s(&ex), "0"]).output().unwrap();
    assert!(out.status.success());
    assert!((String::from_utf8_lossy(&out.stdout).trim().parse::<f64>().unwrap() - 0.75).abs() < 1e-15);
    let out = std::process::Command::new(bin)
        .args(["approximate", s(&ex), "-k", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(12));
}
