use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rahr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rahr"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn simulate_into(dir: &Path) {
    let out = rahr(&[
        "simulate",
        "--n",
        "400",
        "--drift-f",
        "0.002",
        "--seed",
        "5",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn run_into(data: &Path, out_dir: &Path) -> Output {
    let config = data.join("run.cfg");
    fs::write(
        &config,
        format!(
            "spot = {}\nfutures = {}\nwindow = 260\nrestarts = 0\n\
             in_sample_start = 1997-01-01\nin_sample_end = 1998-06-30\n\
             forecast_start = 1998-07-01\nforecast_end = 1999-12-31\n",
            data.join("spot.csv").display(),
            data.join("futures.csv").display()
        ),
    )
    .unwrap();
    rahr(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "3",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ])
}

#[test]
fn smoke_run_writes_full_artifact_set() {
    let tmp = tempfile::tempdir().unwrap();
    simulate_into(tmp.path());
    let out_dir = tmp.path().join("out");
    let out = run_into(tmp.path(), &out_dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in [
        "manifest.json",
        "returns.csv",
        "describe.csv",
        "estimates.csv",
        "hedges_in_sample.csv",
        "hedges_forecast.csv",
        "performance.csv",
        "comparisons.csv",
    ] {
        assert!(out_dir.join(name).is_file(), "missing {name}");
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    for entry in fs::read_dir(&out_dir).unwrap() {
        let path = entry.unwrap().path();
        assert!(!path
            .file_name()
            .unwrap()
            .to_string_lossy()
            .ends_with(".partial"));
        if path.extension().is_some_and(|e| e == "csv") {
            let text = fs::read_to_string(&path).unwrap();
            let header = text.lines().next().unwrap_or_default();
            assert!(header.contains(','), "{} has no header", path.display());
        }
    }
}

#[test]
fn missing_input_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let out = run_into(tmp.path(), &out_dir);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("[ingest]"), "{stderr}");
    assert!(!out_dir.join("hedges_in_sample.csv").exists());
    assert!(!out_dir.join("hedges_forecast.csv").exists());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    simulate_into(tmp.path());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(run_into(tmp.path(), &a).status.success());
    assert!(run_into(tmp.path(), &b).status.success());
    let mut names: Vec<_> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() >= 10);
    for name in names {
        assert_eq!(
            fs::read(a.join(&name)).unwrap(),
            fs::read(b.join(&name)).unwrap(),
            "{name:?}"
        );
    }
}
