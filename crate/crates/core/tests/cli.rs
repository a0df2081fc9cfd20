use std::path::Path;
use std::process::{Command, Output};

fn gapchain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapchain")).args(args).output().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn every_subcommand_runs_in_toy_mode() {
    let dir = tempfile::tempdir().unwrap();
    for mode in ["primes", "sieve", "weights", "construct", "cover", "maier", "gk"] {
        let out = dir.path().join(mode);
        let o = gapchain(&[mode, "--toy", "--seed", "3", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{mode}: {}", String::from_utf8_lossy(&o.stderr));
        let metrics: serde_json::Value = serde_json::from_str(&read(&out, "metrics.json")).unwrap();
        assert_eq!(metrics["config"]["mode"], mode);
        assert_eq!(metrics["config"]["seed"], 3);
        assert!(out.join("report.json").exists());
    }
}

#[test]
fn verify_accepts_then_rejects_a_tampered_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("maier");
    let o = gapchain(&["maier", "--toy", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let cert = out.join("certificate.json");
    assert_eq!(gapchain(&["verify", cert.to_str().unwrap()]).status.code(), Some(0));

    let mut value: serde_json::Value = serde_json::from_str(&read(&out, "certificate.json")).unwrap();
    let first = value["primes"][0]["offset"].as_u64().unwrap();
    value["primes"][0]["offset"] = (first + 1).into();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&value).unwrap()).unwrap();
    let o = gapchain(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL invariant certificate_verifies"));
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(gapchain(&["verify", "/definitely/not/here.json"]).status.code(), Some(2));
    assert_eq!(gapchain(&["verify"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "mode = \"gk\"\n[gk]\nbogus = 1\n").unwrap();
    assert_eq!(gapchain(&["gk", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gk.toml");
    std::fs::write(&cfg, "seed = 4\n[gk]\nx = 100\nk = 1\n").unwrap();
    let out = dir.path().join("gk");
    let o = gapchain(&["gk", "--config", cfg.to_str().unwrap(), "--k", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let metrics: serde_json::Value = serde_json::from_str(&read(&out, "metrics.json")).unwrap();
    assert_eq!(metrics["metrics"]["gk"]["value"], 6);
    assert_eq!(metrics["config"]["seed"], 4);
}

#[test]
fn reruns_write_identical_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = gapchain(&["construct", "--toy", "--seed", "12", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let strip = |dir: &Path| {
        let mut v: serde_json::Value = serde_json::from_str(&read(dir, "metrics.json")).unwrap();
        v["config"]["output"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
    for csv in ["xp.csv", "goodness.csv", "weight_rows.csv"] {
        assert_eq!(read(&a, csv), read(&b, csv), "{csv}");
    }
}

#[test]
fn shipped_configs_run_clean() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&root).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = gapchain::harness::ExperimentConfig::from_toml(&text).unwrap();
        let o = gapchain(&[cfg.mode.name(), "--config", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 4);
}
