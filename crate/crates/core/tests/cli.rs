use std::path::Path;
use std::process::{Command, Output};

fn harmonia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harmonia")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn sweep(config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["sweep", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    harmonia(&args)
}

#[test]
fn crosscheck_all_terms() {
    let base = ["--a", "1", "--b", "2", "--s", "1", "--m", "1", "--q", "2", "--lambda", "0.5", "--mu", "0.5"];
    let mut args = vec!["crosscheck", "--index", "all"];
    args.extend_from_slice(&base);
    let out = harmonia(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with('B')).count(), 12);
    assert!(!text.contains("UNEXPECTED"));

    let mut args = vec!["crosscheck", "--index", "13"];
    args.extend_from_slice(&base);
    assert_eq!(code(&harmonia(&args)), 2);
}

#[test]
fn convexity_exit_codes() {
    let common = ["--s", "1", "--m", "1", "--lo", "1", "--hi", "3", "--grid", "11,11,5"];
    let mut args = vec!["check-convexity", "--f", "linear"];
    args.extend_from_slice(&common);
    assert_eq!(code(&harmonia(&args)), 0);
    let mut args = vec!["check-convexity", "--f", "power:c=-1,p=1"];
    args.extend_from_slice(&common);
    assert_eq!(code(&harmonia(&args)), 1);
    let mut args = vec!["check-convexity", "--f", "nonsense"];
    args.extend_from_slice(&common);
    assert_eq!(code(&harmonia(&args)), 2);
}

#[test]
fn identity_exit_codes() {
    let base = ["verify-identity", "--f", "linear", "--a", "1", "--b", "2", "--lambda", "0.5", "--mu", "0.5"];
    assert_eq!(code(&harmonia(&base)), 0);

    let mut args = base.to_vec();
    args.extend_from_slice(&["--tol", "1e-30"]);
    assert_eq!(code(&harmonia(&args)), 1);

    let mut args = base.to_vec();
    args.push("--printed");
    let out = harmonia(&args);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));

    let negative = ["verify-identity", "--f", "linear", "--a", "1", "--b", "2", "--lambda", "-1.5", "--mu", "2"];
    assert_eq!(code(&harmonia(&negative)), 0);
}

#[test]
fn bounds_paths() {
    let base = ["verify-bounds", "--theorem", "1", "--f", "linear", "--a", "1", "--b", "2", "--s", "1", "--m", "1", "--q", "1"];
    for extra in [&["--preset", "midpoint"][..], &["--lambda", "0.5", "--mu", "0.5", "--path", "closed"]] {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        let out = harmonia(&args);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8(out.stdout).unwrap().contains("result        pass"));
    }
    // Theorem 2 needs q > 1.
    let mut args = base.to_vec();
    args[2] = "2";
    args.extend_from_slice(&["--preset", "simpson"]);
    assert_eq!(code(&harmonia(&args)), 2);
}

#[test]
fn sweep_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"samples": 20, "rng_seed": 5}"#).unwrap();
    let report = dir.path().join("r.json");
    let out = sweep(&config, &report, &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["schema"], "harmonia/v1");
    assert_eq!(v["instances"], 20);
    assert_eq!(v["config"]["rng_seed"], 5);
    assert_eq!(v["identity_fail"], 0);
    assert_eq!(v["unexpected_errata"], 0);
    assert!(v["failures"].as_array().unwrap().is_empty());
    let rows = v["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    for key in ["instance_id", "family", "check", "lhs", "rhs", "margin", "pass"] {
        assert!(rows[0].get(key).is_some(), "row lacks {key}");
    }
}

#[test]
fn sweep_csv_reproducible_and_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"samples": 15}"#).unwrap();
    let paths: Vec<_> = ["a.csv", "b.csv", "c.csv"].iter().map(|n| dir.path().join(n)).collect();
    for (path, seed) in paths.iter().zip(["3", "3", "4"]) {
        assert_eq!(code(&sweep(&config, path, &["--format", "csv", "--seed", seed])), 0);
    }
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(read(&paths[0]), read(&paths[1]));
    assert_ne!(read(&paths[0]), read(&paths[2]));
    let text = String::from_utf8(read(&paths[0])).unwrap();
    assert!(text.lines().count() > 15);
}

#[test]
fn sweep_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    for body in [r#"{"samples": 0}"#, r#"{"unknown_key": 1}"#, "not json"] {
        let config = dir.path().join("c.json");
        std::fs::write(&config, body).unwrap();
        assert_eq!(code(&sweep(&config, &out, &[])), 2, "{body}");
    }
    assert_eq!(code(&sweep(&dir.path().join("missing.json"), &out, &[])), 2);
}
