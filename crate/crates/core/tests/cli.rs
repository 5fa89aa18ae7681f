//! Runs the command line in-process against the shipped scenarios and
//! checks artifacts, manifests and exit codes.

use std::path::{Path, PathBuf};

use reltail::cli::main_from;
use serde_json::Value;

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .display()
        .to_string()
}

fn run(out: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["reltail".to_string(), "--out".into(), out.display().to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    main_from(argv)
}

fn manifest(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

fn csv_rows(path: PathBuf) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

#[test]
fn validate_accepts_shipped_scenarios() {
    for name in ["sys_a.json", "sys_b.json", "shifts.json"] {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run(dir.path(), &["validate", &scenario(name)]), 0, "{name}");
        let m = manifest(dir.path());
        assert_eq!(m["scenario_sha256"].as_str().unwrap().len(), 64);
        assert_eq!(m["exit_code"], 0);
    }
}

#[test]
fn tail_on_sys_a_reaches_log_two_over_eight() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(
        dir.path(),
        &["tail", &scenario("sys_a.json"), "--r", "singletons", "--q", "trivial", "--nmax", "8"],
    );
    assert_eq!(code, 0);
    let rows = csv_rows(dir.path().join("tail.csv"));
    assert_eq!(rows.len(), 8);
    let last: f64 = rows[7][6].parse().unwrap();
    assert!((last - 2f64.ln() / 8.0).abs() < 1e-12);
    let m = manifest(dir.path());
    assert!(m["columns"]["running_inf"].is_string());
    assert_eq!(m["files"], serde_json::json!(["tail.csv", "tail.json"]));
}

#[test]
fn sft_tail_has_constant_log_two_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(
        dir.path(),
        &["sft-tail", &scenario("shifts.json"), "--sft", "two_full", "--rspec", "0,1", "--qspec", "0", "--nmax", "6"],
    );
    assert_eq!(code, 0);
    for row in csv_rows(dir.path().join("sft_tail.csv")) {
        let ratio: f64 = row[6].parse().unwrap();
        assert!((ratio - 2f64.ln()).abs() < 1e-12);
    }
}

#[test]
fn outputs_are_deterministic() {
    let args = ["count", &scenario("sys_a.json"), "--r", "overlap", "--q", "fibers", "--n", "3"];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(run(a.path(), &args), 0);
    assert_eq!(run(b.path(), &args), 0);
    let read = |d: &Path, f: &str| std::fs::read_to_string(d.join(f)).unwrap();
    assert_eq!(read(a.path(), "count.csv"), read(b.path(), "count.csv"));
    // the manifests differ only in the recorded output directory
    let strip = |d: &Path| {
        let mut m = manifest(d);
        m["arguments"][1] = Value::Null;
        m
    };
    assert_eq!(strip(a.path()), strip(b.path()));
}

#[test]
fn invariant_fragments_load_back() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["invariant", &scenario("sys_a.json"), "--system", "A", "--vertices"]), 0);
    let sc = reltail::scenario::load_scenario(dir.path().join("vertices.scenario.json")).unwrap();
    assert_eq!(sc.measures.len(), 1);
    assert_eq!(run(dir.path(), &["invariant", &scenario("sys_a.json"), "--cesaro", "skewed"]), 0);
    assert_eq!(manifest(dir.path())["summary"]["output_defect"], "0");
    assert_eq!(run(dir.path(), &["invariant", &scenario("sys_a.json"), "--lift", "right", "a_only"]), 0);
    assert_eq!(manifest(dir.path())["summary"]["certified"], true);
}

#[test]
fn entropy_and_constructions_run() {
    let dir = tempfile::tempdir().unwrap();
    let a = scenario("sys_a.json");
    assert_eq!(run(dir.path(), &["entropy", &a, "--mu", "skewed", "--r", "singletons", "--sigma", "fibers"]), 0);
    let h = manifest(dir.path())["summary"]["conditional_entropy"].as_f64().unwrap();
    let expect = 0.5 * (-(1.0f64 / 3.0) * (1.0f64 / 3.0).ln() - (2.0f64 / 3.0) * (2.0f64 / 3.0).ln())
        + 0.5 * (-(0.25f64) * 0.25f64.ln() - 0.75f64 * 0.75f64.ln());
    assert!((h - expect).abs() < 1e-12);
    let code = run(
        dir.path(),
        &["entropy", &a, "--mu", "AA_orbit", "--r", "AA_singletons", "--sigma", "factor:right", "--nmax", "3"],
    );
    assert_eq!(code, 0);
    let b = scenario("sys_b.json");
    let code = run(
        dir.path(),
        &["construct", &b, "--diagonal", "--system", "B", "--chain", "singletons", "--pchain", "singletons", "--n", "3", "--delta", "1/2"],
    );
    assert_eq!(code, 0);
    assert_eq!(manifest(dir.path())["summary"]["certified"], true);
    let code = run(
        dir.path(),
        &["construct", &b, "--separated", "--system", "B", "--p", "singletons", "--q", "trivial", "--n", "2", "--delta", "1/2"],
    );
    assert_eq!(code, 0);
    assert_eq!(manifest(dir.path())["summary"]["card_claims_hold"], true);
}

#[test]
fn verify_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["verify", "--suite", "cover", "--seed", "3", "--trials", "5"]), 0);
    assert!(dir.path().join("report.json").exists());
    assert!(dir.path().join("report.txt").exists());
    assert_eq!(manifest(dir.path())["seed"], 3);
}

#[test]
fn exit_codes_classify_errors() {
    let dir = tempfile::tempdir().unwrap();
    let a = scenario("sys_a.json");
    assert_eq!(run(dir.path(), &["count", &a, "--r", "nope", "--q", "trivial", "--n", "1"]), 2);
    assert!(manifest(dir.path())["error"].as_str().unwrap().contains("nope"));
    assert_eq!(run(dir.path(), &["verify", "--suite", "bogus"]), 2);
    assert_eq!(run(dir.path(), &["validate", "/does/not/exist.json"]), 2);
    assert_eq!(run(dir.path(), &["tail", &a, "--r", "singletons"]), 2);
    // a non-invariant measure cannot carry a relative entropy sequence
    assert_eq!(run(dir.path(), &["entropy", &a, "--mu", "uniform", "--r", "singletons", "--sigma", "trivial", "--nmax", "2"]), 2);

    let code = run(
        dir.path(),
        &["--budget", "max_depth=3", "tail", &a, "--r", "singletons", "--q", "trivial", "--nmax", "8"],
    );
    assert_eq!(code, 3);
    assert_eq!(csv_rows(dir.path().join("tail.csv")).len(), 3);
    assert_eq!(manifest(dir.path())["summary"]["depth_reached"], 3);
}

#[test]
fn malformed_scenario_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"version\": 1,\n  \"systems\": [\n").unwrap();
    assert_eq!(run(dir.path(), &["validate", bad.to_str().unwrap()]), 2);
    let err = manifest(dir.path())["error"].as_str().unwrap().to_string();
    assert!(err.contains("line"), "{err}");
}
