use std::process::Command as Process;

use jacquet_core::cache::{Cache, CacheKey, CacheStatus};
use jacquet_core::cli::{cached_invariants, run, Cli, ReportDocument, SessionConfig, EXIT_OK, EXIT_TRUNCATION, EXIT_USAGE};
use jacquet_core::enveloping::Pbw;
use jacquet_core::lie::load_algebra;
use jacquet_core::rational::rat;
use clap::Parser;
use std::sync::Arc;

fn bin() -> Process {
    let mut p = Process::new(env!("CARGO_BIN_EXE_jacquet"));
    p.env_remove("JACQUET_CACHE_DIR");
    p
}

#[test]
fn catalog_lists_four_entries() {
    let out = run(["jacquet", "catalog"]);
    assert_eq!(out.exit_code, EXIT_OK);
    let doc = out.report.unwrap();
    let entries = doc.sections["catalog"].as_array().unwrap();
    let names: Vec<&str> = entries.iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 4);
    for (name, weyl) in [("sl2r", 2), ("sl2c", 2), ("sl3r", 6), ("sp4r", 8)] {
        let e = entries.iter().find(|e| e["name"] == name).unwrap();
        assert_eq!(e["weyl_order"], weyl);
    }
}

#[test]
fn all_sl2r_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = run([
        "jacquet", "all", "--algebra", "sl2r", "--lambda", "3/4", "--truncation", "10", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.exit_code, EXIT_OK, "{}", out.text);
    let doc = ReportDocument::from_json_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let qbar = &doc.sections["boundary"]["Qbar"][0];
    assert_eq!(qbar["entries"][0][0], "5/2");
    assert_eq!(qbar["entries"][1][1], "-1/2");
    for key in ["spherical", "boundary", "verification", "relations", "filtration", "character", "splitting"] {
        assert!(doc.sections.contains_key(key), "missing section {key}");
    }
}

#[test]
fn split_test_resonant_verdict() {
    let out = run(["jacquet", "split-test", "--algebra", "sl2r", "--lambda", "2", "--truncation", "12"]);
    assert_eq!(out.exit_code, EXIT_OK, "{}", out.text);
    let doc = out.report.unwrap();
    assert_eq!(doc.sections["splitting"]["verdict"], "does_not_split_within_horizon");
}

#[test]
fn exit_codes() {
    assert_eq!(run(["jacquet", "verify", "--algebra", "g2", "--lambda", "1"]).exit_code, EXIT_USAGE);
    assert_eq!(run(["jacquet", "verify", "--algebra", "sl2r", "--lambda", "0"]).exit_code, EXIT_USAGE);
    assert_eq!(run(["jacquet", "verify", "--algebra", "sl2r", "--lambda", "1,2"]).exit_code, EXIT_USAGE);
    assert_eq!(run(["jacquet", "verify", "--algebra", "sl2r", "--lambda", "x/y"]).exit_code, EXIT_USAGE);
    assert_eq!(run(["jacquet", "frobnicate"]).exit_code, EXIT_USAGE);
    let short = run(["jacquet", "verify", "--algebra", "sl2r", "--lambda", "2", "-k", "2"]);
    assert_eq!(short.exit_code, EXIT_TRUNCATION);
    assert_eq!(short.report.unwrap().error.unwrap().code, "truncation_too_small");
}

#[test]
fn binary_exit_status() {
    let ok = bin().args(["verify", "--algebra", "sl2r", "--lambda", "3/4", "-k", "6"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    let bad = bin().args(["verify", "--algebra", "nope", "--lambda", "1"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    let short = bin().args(["verify", "--algebra", "sl2r", "--lambda", "-2", "-k", "1"]).output().unwrap();
    assert_eq!(short.status.code(), Some(EXIT_TRUNCATION));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("session.toml");
    std::fs::write(&cfg, "algebra = \"sl3r\"\nlambda = [\"5/2\", \"7/3\"]\ntruncation = 4\n").unwrap();
    let cli = Cli::parse_from(["jacquet", "verify", "--config", cfg.to_str().unwrap(), "-k", "6"]);
    let s = SessionConfig::from_cli(&cli).unwrap();
    assert_eq!(s.algebra.as_deref(), Some("sl3r"));
    assert_eq!(s.lambda, Some(vec![rat(5, 2), rat(7, 3)]));
    assert_eq!(s.truncation, 6);

    let cli = Cli::parse_from(["jacquet", "verify", "--config", cfg.to_str().unwrap(), "--algebra", "sl2r", "--lambda", "1/3"]);
    let s = SessionConfig::from_cli(&cli).unwrap();
    assert_eq!(s.algebra.as_deref(), Some("sl2r"));
    assert_eq!(s.lambda, Some(vec![rat(1, 3)]));
    assert_eq!(s.truncation, 4);

    std::fs::write(&cfg, "algebra = \"sl3r\"\ncolour = 3\n").unwrap();
    let cli = Cli::parse_from(["jacquet", "verify", "--config", cfg.to_str().unwrap()]);
    assert!(SessionConfig::from_cli(&cli).is_err());
}

#[test]
fn report_round_trips_and_is_deterministic() {
    let args = ["jacquet", "filtration", "--algebra", "sl2c", "--lambda", "3/7", "-k", "6"];
    let a = run(args).report.unwrap();
    let b = run(args).report.unwrap();
    assert_eq!(a.without_timing(), b.without_timing());
    assert_eq!(a.without_timing().to_json_string(), b.without_timing().to_json_string());
    let back = ReportDocument::from_json_str(&a.to_json_string()).unwrap();
    assert_eq!(back, a);
}

#[test]
fn cache_hit_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::at(dir.path());
    let pbw = Pbw::new(Arc::new(load_algebra("sl3r").unwrap()));
    let (first, s1) = cached_invariants(&cache, &pbw).unwrap();
    let (second, s2) = cached_invariants(&cache, &pbw).unwrap();
    assert_eq!(s1, CacheStatus::Miss);
    assert_eq!(s2, CacheStatus::Hit);
    let alg = &pbw.alg;
    let fresh = jacquet_core::enveloping::select_invariants(&pbw).unwrap();
    let bytes = |d: &jacquet_core::enveloping::InvariantData| serde_json::to_vec(&d.to_json(alg)).unwrap();
    assert_eq!(bytes(&first), bytes(&second));
    assert_eq!(bytes(&fresh), bytes(&second));
}

#[test]
fn truncated_cache_entry_is_recovered() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::at(dir.path());
    let key = CacheKey::new("sl2r", "demo", serde_json::json!({ "K": 8 }));
    let (v, s) = cache.get_or_compute(&key, || Ok(serde_json::json!({ "x": "1/2" }))).unwrap();
    assert_eq!(s, CacheStatus::Miss);
    let path = cache.path_for(&key).unwrap();
    let text = std::fs::read(&path).unwrap();
    std::fs::write(&path, &text[..text.len() / 2]).unwrap();
    let (again, s) = cache.get_or_compute(&key, || Ok(serde_json::json!({ "x": "1/2" }))).unwrap();
    assert_eq!(s, CacheStatus::Recovered);
    assert_eq!(again, v);
    let (_, s) = cache.get_or_compute(&key, || unreachable!()).unwrap();
    assert_eq!(s, CacheStatus::Hit);
}

#[test]
fn different_parameters_use_different_keys() {
    let a = CacheKey::new("sl2r", "boundary", serde_json::json!({ "K": 8 }));
    let b = CacheKey::new("sl2r", "boundary", serde_json::json!({ "K": 10 }));
    let c = CacheKey::new("sl3r", "boundary", serde_json::json!({ "K": 8 }));
    assert_ne!(a.digest(), b.digest());
    assert_ne!(a.digest(), c.digest());
    assert_eq!(a.digest(), CacheKey::new("sl2r", "boundary", serde_json::json!({ "K": 8 })).digest());
}

#[test]
fn unwritable_cache_degrades_to_compute() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("not-a-dir");
    std::fs::write(&file, b"x").unwrap();
    let cache = Cache::at(file.join("sub"));
    let key = CacheKey::new("sl2r", "demo", serde_json::json!({}));
    let (v, _) = cache.get_or_compute(&key, || Ok(serde_json::json!(3))).unwrap();
    assert_eq!(v, serde_json::json!(3));
}
